#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "rhc/rhc.hpp"
#include "rhc/riccati.hpp"

namespace rhc {

// Which terminal penalty a sweep table was produced with. The order label k
// is the Taylor order of the value-function expansion the penalty retains:
// k=1 keeps nothing (Zero), k=2 the quadratic term, k=3 adds the cubic term.
enum class PenaltyOrder { k1 = 1, k2 = 2, k3 = 3 };

std::string penalty_label(PenaltyOrder k);

struct SweepSpec {
    std::vector<double> tau_values;   // ascending
    std::vector<double> T_values;     // ascending
    std::vector<PenaltyOrder> penalties;
    BilinearSystem system;
    Vec y0;
    double L = 5.0;
    SolverOptions opts;
    int jobs = 1;                     // concurrent cell evaluations
    // Default grids 0.1, 0.4, ..., 2.8 and all three penalties.
    static SweepSpec benchmark(const BilinearSystem& sys, const Vec& y0);
    void check() const;
};

// One cell of a sweep table: a value, or an error marker explaining why the
// cell could not be evaluated. Cells with tau > T are absent entirely.
struct Cell {
    std::optional<double> value;
    std::string error;                // non-empty iff value is absent
};

struct SweepTable {
    std::vector<double> tau_values;   // row labels
    std::vector<double> T_values;     // column labels
    std::vector<std::vector<std::optional<Cell>>> cells;  // [row][col], set iff tau <= T
    std::string label;                // penalty label, or "rho(<label>)"
    double lambda = 0.0;              // decay rate used downstream
    double reference_certificate = 0.0;  // insensitivity of the shared reference

    const std::optional<Cell>& at(int i, int j) const { return cells[i][j]; }
    bool has_value(int i, int j) const;
    double value(int i, int j) const;  // throws InvalidInputError if absent
    int rows() const { return static_cast<int>(tau_values.size()); }
    int cols() const { return static_cast<int>(T_values.size()); }
};

// Runs the full (tau, T) grid for every requested penalty against a single
// shared reference solution. Cell value: ||u_rh - u_ref||_{L2(0,L)}.
// Cell-level failures become error markers, never abort the sweep.
std::vector<SweepTable> run_sweep(const SweepSpec& spec);

// Elementwise ln(value) + (k+1)*lambda*T - lambda*tau. Cells with
// non-positive values are marked undefined.
SweepTable rho_table(const SweepTable& table, double lambda, PenaltyOrder k);

struct Violation {
    double tau = 0.0, T = 0.0;
    std::string kind;                 // "row", "column", or "cross"
    double magnitude = 0.0;           // how far from monotone, in cell units
};

struct MonotonicityReport {
    std::vector<Violation> violations;
    bool clean() const { return violations.empty(); }
};

// Error tables should be non-increasing along each row (growing T) and
// non-decreasing down each column (growing tau). Weak inequalities; every
// breach is listed with its magnitude.
MonotonicityReport monotonicity_report(const SweepTable& table);

// Cross-table check: at each shared (tau, T) cell the error should be
// non-increasing in the penalty order. Tables must be in ascending-k order.
MonotonicityReport monotonicity_report(const std::vector<SweepTable>& tables);

enum class TableFormat { csv, markdown };

// Two-significant-digit scientific form matching the table style used
// throughout, e.g. 4.3e+0, 3.8e-4. Empty string for absent cells.
std::string format_cell(const std::optional<Cell>& cell);

std::string to_text(const SweepTable& table, TableFormat format);
void export_table(const SweepTable& table, const std::string& path, TableFormat format);

// Inverse of the CSV exporter; export(import(export(t))) is byte-identical.
SweepTable import_table_csv(const std::string& path);

}  // namespace rhc
