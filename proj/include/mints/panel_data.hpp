#ifndef MINTS_PANEL_DATA_HPP
#define MINTS_PANEL_DATA_HPP

#include <string>
#include <vector>

#include "mints/types.hpp"

namespace mints {

// Truncation rules for the two variables. The Y upper bound is a rule
// rather than a number: y_up(x) = min(x, y_cap) is evaluated against the
// current X of the same cell. Year-zero bounds are per country,
// [x_low, min observed X] and [y_low, min observed Y] (y_cap when a
// country has no observed Y).
struct BoundsSpec {
  double x_low = 0.0;
  double x_up = kInf;
  double y_low = 0.0;
  double y_cap = 100.0;
  Vector x0_up; // per country
  Vector y0_up; // per country

  double y_up(double x) const { return std::min(x, y_cap); }
};

// C x T panel of the auxiliary variable X and the variable of interest Y
// with response masks. Values are meaningful only where the mask is true.
// Immutable once loaded; chains keep their own mutable imputed grids.
struct PanelDataset {
  std::vector<std::string> country_ids;
  int first_year = 0; // calendar year at t = 1
  Matrix x_values;    // C x T
  Matrix y_values;    // C x T
  BoolGrid x_mask;    // R^X
  BoolGrid y_mask;    // R^Y
  BoundsSpec bounds;

  Index n_countries() const { return x_values.rows(); }
  Index n_years() const { return x_values.cols(); }
  int year_of(Index t) const { return first_year + static_cast<int>(t); } // t is 0-based
};

struct CompleteCases {
  Vector x;
  Vector y;
  Index size() const { return x.size(); }
};

// Column mapping for the CSV loader; defaults match the wire format
// `country,year,x,y` with empty fields marking missing values.
struct CsvSchema {
  std::string country = "country";
  std::string year = "year";
  std::string x = "x";
  std::string y = "y";
};

// Parses a panel CSV. Years are unioned across countries into a contiguous
// grid; absent (country, year) rows and empty fields become missing cells.
// Rejects duplicate (country, year) rows, malformed rows (with line number),
// countries with no observed X, and observed values outside their bounds.
PanelDataset load_csv(const std::string& path, const BoundsSpec& bounds = BoundsSpec{},
                      const CsvSchema& schema = CsvSchema{});

// Writes the panel back in loader format. `header_comment`, when nonempty,
// is emitted first as a `# ...` line.
void write_csv(const PanelDataset& d, const std::string& path,
               const std::string& header_comment = "");

// Finalizes bounds derived from the data (per-country year-zero caps).
// Called by load_csv; exposed for datasets built in memory.
void attach_bounds(PanelDataset& d, const BoundsSpec& base);

// Validates mask/value agreement, the at-least-one-X-per-country assumption,
// and observed-value bounds. Throws std::invalid_argument on violation.
void validate(const PanelDataset& d);

// Cells where both X and Y are observed, in row-major (country, year) order.
CompleteCases complete_cases(const PanelDataset& d);

} // namespace mints

#endif
