#pragma once

#include <cstdio>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "kdst/errors.hpp"
#include "kdst/lp.hpp"

namespace kdst::lp {

namespace detail {

inline std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline std::string pad(const std::string& s, std::size_t width) {
  return s.size() >= width ? s + " " : s + std::string(width - s.size(), ' ');
}

// Recover a semantic tag from an exported variable name.
inline VarTag tag_from_name(const std::string& name) {
  auto parse_suffix = [](const std::string& s, int& a, int& b) -> int {
    const auto us = s.find('_');
    try {
      if (us == std::string::npos) {
        a = std::stoi(s);
        return 1;
      }
      a = std::stoi(s.substr(0, us));
      b = std::stoi(s.substr(us + 1));
      return 2;
    } catch (const std::exception&) {
      return 0;
    }
  };
  VarTag tag;
  int a = -1, b = -1;
  if (name.rfind("x_", 0) == 0 && parse_suffix(name.substr(2), a, b) == 1)
    return {VarTag::Kind::X, a, -1};
  if (name.rfind("y_", 0) == 0 && parse_suffix(name.substr(2), a, b) == 1)
    return {VarTag::Kind::Y, a, -1};
  if (name.rfind("f_", 0) == 0 && parse_suffix(name.substr(2), a, b) == 2)
    return {VarTag::Kind::F, a, b};
  if (name.rfind("xh_", 0) == 0 && parse_suffix(name.substr(3), a, b) == 1)
    return {VarTag::Kind::XHat, a, -1};
  if (name.rfind("fh_", 0) == 0 && parse_suffix(name.substr(3), a, b) == 2)
    return {VarTag::Kind::FHat, a, b};
  return tag;
}

} // namespace detail

// Fixed-layout MPS (minimization). Constraint rows are named c<i>; the
// objective row is COST. Names longer than the classic 8-character fields
// simply widen their column, which every modern reader accepts.
inline std::string write_mps(const LinearProgram& lp,
                             const std::string& name = "KDST") {
  std::ostringstream out;
  out << "NAME          " << name << "\n";
  out << "ROWS\n";
  out << " N  COST\n";
  for (int i = 0; i < lp.constraint_count(); ++i) {
    const char rel = lp.relations[i] == Relation::LessEq      ? 'L'
                     : lp.relations[i] == Relation::GreaterEq ? 'G'
                                                              : 'E';
    out << " " << rel << "  c" << i << "\n";
  }

  // Column-major entries: objective first, then rows in index order.
  std::vector<std::vector<std::pair<int, double>>> by_col(lp.variable_count());
  for (int i = 0; i < lp.constraint_count(); ++i)
    for (const auto& [col, coeff] : lp.rows[i])
      if (coeff != 0.0) by_col[col].push_back({i, coeff});

  out << "COLUMNS\n";
  for (int j = 0; j < lp.variable_count(); ++j) {
    const std::string vn = lp.variable_name(j);
    if (lp.objective[j] != 0.0)
      out << "    " << detail::pad(vn, 10) << detail::pad("COST", 10)
          << detail::num(lp.objective[j]) << "\n";
    for (const auto& [row, coeff] : by_col[j])
      out << "    " << detail::pad(vn, 10)
          << detail::pad("c" + std::to_string(row), 10) << detail::num(coeff)
          << "\n";
  }

  out << "RHS\n";
  for (int i = 0; i < lp.constraint_count(); ++i)
    if (lp.rhs[i] != 0.0)
      out << "    " << detail::pad("RHS", 10)
          << detail::pad("c" + std::to_string(i), 10) << detail::num(lp.rhs[i])
          << "\n";

  out << "BOUNDS\n";
  for (int j = 0; j < lp.variable_count(); ++j) {
    const std::string vn = lp.variable_name(j);
    if (lp.lower[j] == lp.upper[j]) {
      out << " FX " << detail::pad("BND", 10) << detail::pad(vn, 10)
          << detail::num(lp.lower[j]) << "\n";
      continue;
    }
    if (lp.lower[j] != 0.0)
      out << " LO " << detail::pad("BND", 10) << detail::pad(vn, 10)
          << detail::num(lp.lower[j]) << "\n";
    if (lp.upper[j] < kInfinity)
      out << " UP " << detail::pad("BND", 10) << detail::pad(vn, 10)
          << detail::num(lp.upper[j]) << "\n";
  }
  out << "ENDATA\n";
  return out.str();
}

// Parses the subset of MPS this project writes (plus FR/MI bound rows for
// robustness). Variable order follows first appearance in COLUMNS.
inline LinearProgram read_mps(const std::string& text) {
  LinearProgram lp;
  std::map<std::string, int> row_index;
  std::string objective_row;
  std::map<std::string, int> col_index;

  enum class Section { None, Rows, Columns, Rhs, Bounds, Done };
  Section section = Section::None;

  auto get_col = [&](const std::string& name) -> int {
    auto it = col_index.find(name);
    if (it != col_index.end()) return it->second;
    const int j = lp.add_variable(0.0, 0.0, kInfinity, detail::tag_from_name(name));
    col_index.emplace(name, j);
    return j;
  };
  auto to_number = [](const std::string& tok) -> double {
    try {
      std::size_t pos = 0;
      const double v = std::stod(tok, &pos);
      if (pos != tok.size()) throw std::invalid_argument(tok);
      return v;
    } catch (const std::exception&) {
      throw ParseError("mps: bad numeric field '" + tok + "'");
    }
  };

  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '*') continue;
    std::istringstream ls(line);
    std::vector<std::string> tok;
    std::string t;
    while (ls >> t) tok.push_back(t);
    if (tok.empty()) continue;

    if (!std::isspace(static_cast<unsigned char>(line[0]))) {
      const std::string& head = tok[0];
      if (head == "NAME") section = Section::None;
      else if (head == "ROWS") section = Section::Rows;
      else if (head == "COLUMNS") section = Section::Columns;
      else if (head == "RHS") section = Section::Rhs;
      else if (head == "BOUNDS") section = Section::Bounds;
      else if (head == "RANGES")
        throw ParseError("mps: RANGES section not supported");
      else if (head == "ENDATA") section = Section::Done;
      else throw ParseError("mps: unknown section '" + head + "'");
      continue;
    }

    switch (section) {
      case Section::Rows: {
        if (tok.size() != 2) throw ParseError("mps: bad ROWS line: " + line);
        if (tok[0] == "N") {
          if (objective_row.empty()) objective_row = tok[1];
          break;
        }
        Relation rel;
        if (tok[0] == "L") rel = Relation::LessEq;
        else if (tok[0] == "G") rel = Relation::GreaterEq;
        else if (tok[0] == "E") rel = Relation::Equal;
        else throw ParseError("mps: unknown row type '" + tok[0] + "'");
        row_index.emplace(tok[1], lp.constraint_count());
        lp.rows.emplace_back();
        lp.relations.push_back(rel);
        lp.rhs.push_back(0.0);
        break;
      }
      case Section::Columns: {
        if (tok.size() != 3 && tok.size() != 5)
          throw ParseError("mps: bad COLUMNS line: " + line);
        const int j = get_col(tok[0]);
        for (std::size_t i = 1; i + 1 < tok.size(); i += 2) {
          const double v = to_number(tok[i + 1]);
          if (tok[i] == objective_row) {
            lp.objective[j] = v;
          } else {
            auto it = row_index.find(tok[i]);
            if (it == row_index.end())
              throw ParseError("mps: unknown row '" + tok[i] + "'");
            lp.rows[it->second].push_back({j, v});
          }
        }
        break;
      }
      case Section::Rhs: {
        if (tok.size() != 3 && tok.size() != 5)
          throw ParseError("mps: bad RHS line: " + line);
        for (std::size_t i = 1; i + 1 < tok.size(); i += 2) {
          auto it = row_index.find(tok[i]);
          if (it == row_index.end())
            throw ParseError("mps: unknown row '" + tok[i] + "'");
          lp.rhs[it->second] = to_number(tok[i + 1]);
        }
        break;
      }
      case Section::Bounds: {
        if (tok.size() < 3) throw ParseError("mps: bad BOUNDS line: " + line);
        const std::string& kind = tok[0];
        const int j = get_col(tok[2]);
        if (kind == "FR") {
          lp.lower[j] = -kInfinity;
        } else if (kind == "MI") {
          lp.lower[j] = -kInfinity;
        } else {
          if (tok.size() != 4) throw ParseError("mps: bad BOUNDS line: " + line);
          const double v = to_number(tok[3]);
          if (kind == "UP") lp.upper[j] = v;
          else if (kind == "LO") lp.lower[j] = v;
          else if (kind == "FX") lp.lower[j] = lp.upper[j] = v;
          else throw ParseError("mps: unknown bound type '" + kind + "'");
        }
        break;
      }
      case Section::None:
      case Section::Done:
        break;
    }
  }
  for (auto& row : lp.rows) std::sort(row.begin(), row.end());
  return lp;
}

} // namespace kdst::lp
