#include "mints/panel_data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

namespace mints {

namespace {

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::stringstream ss(line);
  while (std::getline(ss, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.push_back("");
  return out;
}

double parse_value(const std::string& s, std::size_t line_no, const char* what) {
  double v = 0.0;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  auto res = std::from_chars(first, last, v);
  if (res.ec != std::errc{} || res.ptr != last)
    throw std::runtime_error("parse error at line " + std::to_string(line_no) + ": bad " +
                             std::string(what) + " value '" + s + "'");
  return v;
}

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r\n");
  auto e = s.find_last_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  return s.substr(b, e - b + 1);
}

} // namespace

void attach_bounds(PanelDataset& d, const BoundsSpec& base) {
  d.bounds = base;
  const Index C = d.n_countries(), T = d.n_years();
  d.bounds.x0_up.resize(C);
  d.bounds.y0_up.resize(C);
  for (Index c = 0; c < C; ++c) {
    double xmin = kInf, ymin = kInf;
    for (Index t = 0; t < T; ++t) {
      if (d.x_mask(c, t)) xmin = std::min(xmin, d.x_values(c, t));
      if (d.y_mask(c, t)) ymin = std::min(ymin, d.y_values(c, t));
    }
    d.bounds.x0_up(c) = xmin; // every country has >= 1 observed X
    d.bounds.y0_up(c) = std::isfinite(ymin) ? ymin : base.y_cap;
  }
}

void validate(const PanelDataset& d) {
  const Index C = d.n_countries(), T = d.n_years();
  if (d.y_values.rows() != C || d.y_values.cols() != T || d.x_mask.rows() != C ||
      d.x_mask.cols() != T || d.y_mask.rows() != C || d.y_mask.cols() != T)
    throw std::invalid_argument("panel: inconsistent grid shapes");
  if (static_cast<Index>(d.country_ids.size()) != C)
    throw std::invalid_argument("panel: country label count mismatch");

  std::vector<std::string> no_x;
  for (Index c = 0; c < C; ++c) {
    bool any_x = false;
    for (Index t = 0; t < T; ++t) {
      if (d.x_mask(c, t)) {
        any_x = true;
        const double x = d.x_values(c, t);
        if (!(x >= d.bounds.x_low && x <= d.bounds.x_up))
          throw std::invalid_argument("panel: X out of bounds for " + d.country_ids[c] +
                                      " year " + std::to_string(d.year_of(t)));
      }
      if (d.y_mask(c, t)) {
        const double y = d.y_values(c, t);
        double y_up = d.bounds.y_cap;
        if (d.x_mask(c, t)) y_up = d.bounds.y_up(d.x_values(c, t));
        if (!(y >= d.bounds.y_low && y <= y_up))
          throw std::invalid_argument("panel: Y out of bounds for " + d.country_ids[c] +
                                      " year " + std::to_string(d.year_of(t)));
      }
    }
    if (!any_x) no_x.push_back(d.country_ids[c]);
  }
  if (!no_x.empty()) {
    std::string msg = "panel: countries with no observed X:";
    for (const auto& id : no_x) msg += " " + id;
    throw std::invalid_argument(msg);
  }
}

PanelDataset load_csv(const std::string& path, const BoundsSpec& bounds, const CsvSchema& schema) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);

  std::string line;
  std::size_t line_no = 0;
  // Skip leading comment lines (run metadata written by this tool).
  std::vector<std::string> header;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line[0] == '#') continue;
    header = split_fields(trim(line));
    break;
  }
  if (header.empty()) throw std::runtime_error(path + ": empty file");

  auto col = [&](const std::string& name) {
    for (std::size_t i = 0; i < header.size(); ++i)
      if (trim(header[i]) == name) return static_cast<int>(i);
    throw std::runtime_error(path + ": missing column '" + name + "'");
  };
  const int ci = col(schema.country), yi = col(schema.year), xi = col(schema.x),
            vi = col(schema.y);

  struct Row {
    std::string country;
    int year;
    bool has_x, has_y;
    double x, y;
  };
  std::vector<Row> rows;
  std::set<std::string> countries_seen;
  std::set<std::pair<std::string, int>> keys;
  int year_min = std::numeric_limits<int>::max();
  int year_max = std::numeric_limits<int>::min();

  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    auto f = split_fields(t);
    if (static_cast<int>(f.size()) <= std::max(std::max(ci, yi), std::max(xi, vi)))
      throw std::runtime_error("parse error at line " + std::to_string(line_no) +
                               ": too few fields");
    Row r;
    r.country = trim(f[ci]);
    if (r.country.empty())
      throw std::runtime_error("parse error at line " + std::to_string(line_no) +
                               ": empty country");
    r.year = static_cast<int>(parse_value(trim(f[yi]), line_no, "year"));
    const std::string xs = trim(f[xi]), ys = trim(f[vi]);
    r.has_x = !xs.empty();
    r.has_y = !ys.empty();
    r.x = r.has_x ? parse_value(xs, line_no, "x") : 0.0;
    r.y = r.has_y ? parse_value(ys, line_no, "y") : 0.0;
    if (!keys.insert({r.country, r.year}).second)
      throw std::runtime_error("duplicate (country, year) at line " + std::to_string(line_no) +
                               ": " + r.country + "," + std::to_string(r.year));
    countries_seen.insert(r.country);
    year_min = std::min(year_min, r.year);
    year_max = std::max(year_max, r.year);
    rows.push_back(std::move(r));
  }
  if (rows.empty()) throw std::runtime_error(path + ": no data rows");

  PanelDataset d;
  d.country_ids.assign(countries_seen.begin(), countries_seen.end());
  d.first_year = year_min;
  const Index C = static_cast<Index>(d.country_ids.size());
  const Index T = static_cast<Index>(year_max - year_min + 1);
  d.x_values = Matrix::Zero(C, T);
  d.y_values = Matrix::Zero(C, T);
  d.x_mask = BoolGrid::Constant(C, T, false);
  d.y_mask = BoolGrid::Constant(C, T, false);

  std::map<std::string, Index> index;
  for (Index c = 0; c < C; ++c) index[d.country_ids[c]] = c;
  for (const auto& r : rows) {
    const Index c = index[r.country];
    const Index t = r.year - year_min;
    if (r.has_x) {
      d.x_values(c, t) = r.x;
      d.x_mask(c, t) = true;
    }
    if (r.has_y) {
      d.y_values(c, t) = r.y;
      d.y_mask(c, t) = true;
    }
  }

  attach_bounds(d, bounds);
  validate(d);
  return d;
}

void write_csv(const PanelDataset& d, const std::string& path, const std::string& header_comment) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  if (!header_comment.empty()) out << "# " << header_comment << "\n";
  out << "country,year,x,y\n";
  out.precision(12);
  for (Index c = 0; c < d.n_countries(); ++c)
    for (Index t = 0; t < d.n_years(); ++t) {
      out << d.country_ids[c] << ',' << d.year_of(t) << ',';
      if (d.x_mask(c, t)) out << d.x_values(c, t);
      out << ',';
      if (d.y_mask(c, t)) out << d.y_values(c, t);
      out << '\n';
    }
}

CompleteCases complete_cases(const PanelDataset& d) {
  std::vector<double> xs, ys;
  for (Index c = 0; c < d.n_countries(); ++c)
    for (Index t = 0; t < d.n_years(); ++t)
      if (d.x_mask(c, t) && d.y_mask(c, t)) {
        xs.push_back(d.x_values(c, t));
        ys.push_back(d.y_values(c, t));
      }
  CompleteCases cc;
  cc.x = Eigen::Map<Vector>(xs.data(), static_cast<Index>(xs.size()));
  cc.y = Eigen::Map<Vector>(ys.data(), static_cast<Index>(ys.size()));
  return cc;
}

} // namespace mints
