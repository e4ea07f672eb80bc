// SPDX-License-Identifier: Apache-2.0
#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>

#include "gridplan/lp.hpp"

namespace gridplan {

namespace {

std::string code(char prefix, std::size_t index) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%c%07zu", prefix, index + 1);
  return buf;
}

// Shortest %g rendering that fits the 12-character numeric field.
std::string number(double v) {
  char buf[32];
  for (int precision = 12; precision > 0; --precision) {
    std::snprintf(buf, sizeof buf, "%.*g", precision, v);
    if (std::string(buf).size() <= 12) return buf;
  }
  return buf;
}

std::string pad(std::string s, std::size_t width) {
  if (s.size() < width) s.append(width - s.size(), ' ');
  return s;
}

// Field layout: 2-3, 5-12, 15-22, 25-36, 40-47, 50-61.
std::string line(const std::string& f1, const std::string& f2, const std::string& f3 = {},
                 const std::string& f4 = {}, const std::string& f5 = {},
                 const std::string& f6 = {}) {
  std::string out = " " + pad(f1, 2) + " " + pad(f2, 8) + "  " + pad(f3, 8) + "  " + pad(f4, 12);
  if (!f5.empty()) out += "   " + pad(f5, 8) + "  " + f6;
  while (!out.empty() && out.back() == ' ') out.pop_back();
  return out;
}

}  // namespace

void write_mps(std::ostream& out, const LinearProgram& lp, const std::string& name) {
  const auto& rows = lp.rows();
  const std::size_t n = lp.num_variables();

  out << "* variables\n";
  for (std::size_t j = 0; j < n; ++j) out << "* " << code('X', j) << ' ' << lp.variable_names()[j] << '\n';
  out << "* rows\n";
  for (std::size_t i = 0; i < rows.size(); ++i) out << "* " << code('R', i) << ' ' << rows[i].name << '\n';

  out << "NAME          " << name << '\n' << "ROWS\n" << " N  COST\n";
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const char* rel = rows[i].relation == Relation::LessEqual ? "L"
                      : rows[i].relation == Relation::Equal   ? "E"
                                                              : "G";
    out << line(rel, code('R', i)) << '\n';
  }

  std::vector<std::vector<std::pair<std::size_t, double>>> columns(n);
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (const auto& t : rows[i].terms) columns[t.var].emplace_back(i, t.coef);

  out << "COLUMNS\n";
  for (std::size_t j = 0; j < n; ++j) {
    std::vector<std::pair<std::string, double>> entries;
    if (lp.objective()[j] != 0.0) entries.emplace_back("COST", lp.objective()[j]);
    for (const auto& [i, c] : columns[j]) entries.emplace_back(code('R', i), c);
    if (entries.empty()) entries.emplace_back("COST", 0.0);
    for (std::size_t k = 0; k < entries.size(); k += 2) {
      if (k + 1 < entries.size())
        out << line("", code('X', j), entries[k].first, number(entries[k].second),
                    entries[k + 1].first, number(entries[k + 1].second))
            << '\n';
      else
        out << line("", code('X', j), entries[k].first, number(entries[k].second)) << '\n';
    }
  }

  out << "RHS\n";
  for (std::size_t i = 0; i < rows.size(); ++i)
    if (rows[i].rhs != 0.0) out << line("", "RHS", code('R', i), number(rows[i].rhs)) << '\n';

  out << "BOUNDS\n";
  for (std::size_t j = 0; j < n; ++j) {
    const double lo = lp.lower()[j];
    const double up = lp.upper()[j];
    const auto c = code('X', j);
    if (lo == up) {
      out << line("FX", "BND", c, number(lo)) << '\n';
      continue;
    }
    if (!std::isfinite(lo)) out << line("MI", "BND", c) << '\n';
    else if (lo != 0.0) out << line("LO", "BND", c, number(lo)) << '\n';
    if (std::isfinite(up)) out << line("UP", "BND", c, number(up)) << '\n';
  }
  out << "ENDATA\n";
}

}  // namespace gridplan
