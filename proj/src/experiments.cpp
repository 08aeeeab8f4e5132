#include "rhc/experiments.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <thread>

#include "rhc/norms.hpp"
#include "rhc/taylor.hpp"

namespace rhc {

std::string penalty_label(PenaltyOrder k) {
    switch (k) {
        case PenaltyOrder::k1: return "k=1";
        case PenaltyOrder::k2: return "k=2";
        case PenaltyOrder::k3: return "k=3";
    }
    throw InvalidInputError("unknown penalty order");
}

SweepSpec SweepSpec::benchmark(const BilinearSystem& sys, const Vec& y0_) {
    SweepSpec spec;
    for (int j = 0; j < 10; ++j) {
        spec.tau_values.push_back((1 + 3 * j) / 10.0);
        spec.T_values.push_back((1 + 3 * j) / 10.0);
    }
    spec.penalties = {PenaltyOrder::k1, PenaltyOrder::k2, PenaltyOrder::k3};
    spec.system = sys;
    spec.y0 = y0_;
    spec.L = 5.0;
    return spec;
}

void SweepSpec::check() const {
    system.check();
    if (y0.size() != system.dim()) {
        throw InvalidInputError("sweep spec: y0 has wrong dimension");
    }
    if (tau_values.empty() || T_values.empty() || penalties.empty()) {
        throw InvalidInputError("sweep spec: empty grid or penalty list");
    }
    for (size_t i = 1; i < tau_values.size(); ++i) {
        if (!(tau_values[i] > tau_values[i - 1])) {
            throw InvalidInputError("sweep spec: tau values must ascend");
        }
    }
    for (size_t i = 1; i < T_values.size(); ++i) {
        if (!(T_values[i] > T_values[i - 1])) {
            throw InvalidInputError("sweep spec: T values must ascend");
        }
    }
    if (!(L > 0.0) || jobs < 1) {
        throw InvalidInputError("sweep spec: bad span or job count");
    }
}

bool SweepTable::has_value(int i, int j) const {
    return cells[i][j].has_value() && cells[i][j]->value.has_value();
}

double SweepTable::value(int i, int j) const {
    if (!has_value(i, j)) {
        throw InvalidInputError("sweep table: no value at requested cell");
    }
    return *cells[i][j]->value;
}

namespace {

SweepTable empty_table(const SweepSpec& spec, const std::string& label,
                       double lambda, double certificate) {
    SweepTable t;
    t.tau_values = spec.tau_values;
    t.T_values = spec.T_values;
    t.label = label;
    t.lambda = lambda;
    t.reference_certificate = certificate;
    t.cells.assign(spec.tau_values.size(),
                   std::vector<std::optional<Cell>>(spec.T_values.size()));
    return t;
}

std::string first_line(const std::string& s) {
    const auto pos = s.find('\n');
    return pos == std::string::npos ? s : s.substr(0, pos);
}

TerminalPenalty penalty_for(PenaltyOrder k, const RiccatiSolution& ric,
                            const SymTensor3* T3) {
    switch (k) {
        case PenaltyOrder::k1: return TerminalPenalty::Zero();
        case PenaltyOrder::k2: return TerminalPenalty::Taylor2(ric.Pi);
        case PenaltyOrder::k3: return TerminalPenalty::Taylor3(ric.Pi, *T3);
    }
    throw InvalidInputError("unknown penalty order");
}

}  // namespace

std::vector<SweepTable> run_sweep(const SweepSpec& spec) {
    spec.check();
    const RiccatiSolution ric = solve_are(spec.system);
    SymTensor3 T3;
    for (PenaltyOrder k : spec.penalties) {
        if (k == PenaltyOrder::k3) {
            T3 = solve_cubic_term(spec.system, ric);
            break;
        }
    }
    double certificate = 0.0;
    const OcpSolution ref =
        reference_solution(spec.system, spec.y0, spec.L, spec.opts, &certificate);

    std::vector<SweepTable> tables;
    std::vector<TerminalPenalty> phis;
    for (PenaltyOrder k : spec.penalties) {
        tables.push_back(
            empty_table(spec, penalty_label(k), ric.lambda, certificate));
        phis.push_back(penalty_for(k, ric, &T3));
    }

    struct Task {
        int table, i, j;
    };
    std::vector<Task> tasks;
    for (int t = 0; t < static_cast<int>(tables.size()); ++t) {
        for (int i = 0; i < tables[t].rows(); ++i) {
            for (int j = 0; j < tables[t].cols(); ++j) {
                if (spec.tau_values[i] <= spec.T_values[j] + 1e-12) {
                    tasks.push_back({t, i, j});
                }
            }
        }
    }

    auto run_cell = [&](const Task& task) {
        Cell cell;
        try {
            RhcConfig cfg;
            cfg.tau = spec.tau_values[task.i];
            cfg.T = spec.T_values[task.j];
            cfg.L = spec.L;
            cfg.phi = phis[task.table];
            cfg.opts = spec.opts;
            const RhcResult res = run_rhc(spec.system, spec.y0, cfg);
            cell.value = l2_distance(res.u_rh, ref.u);
        } catch (const std::exception& e) {
            cell.value.reset();
            cell.error = first_line(e.what());
        }
        tables[task.table].cells[task.i][task.j] = std::move(cell);
    };

    const int workers =
        std::max(1, std::min(spec.jobs, static_cast<int>(tasks.size())));
    if (workers == 1) {
        for (const Task& task : tasks) run_cell(task);
    } else {
        std::atomic<size_t> next{0};
        std::vector<std::thread> pool;
        for (int wkr = 0; wkr < workers; ++wkr) {
            pool.emplace_back([&]() {
                for (;;) {
                    const size_t idx = next.fetch_add(1);
                    if (idx >= tasks.size()) return;
                    run_cell(tasks[idx]);
                }
            });
        }
        for (std::thread& th : pool) th.join();
    }
    return tables;
}

SweepTable rho_table(const SweepTable& table, double lambda, PenaltyOrder k) {
    SweepTable out = table;
    out.label = "rho(" + table.label + ")";
    out.lambda = lambda;
    const double kk = static_cast<double>(static_cast<int>(k));
    for (int i = 0; i < table.rows(); ++i) {
        for (int j = 0; j < table.cols(); ++j) {
            auto& cell = out.cells[i][j];
            if (!cell.has_value() || !cell->value.has_value()) continue;
            const double v = *cell->value;
            if (!(v > 0.0)) {
                cell->value.reset();
                cell->error = "undefined (non-positive cell)";
                continue;
            }
            cell->value = std::log(v) + (kk + 1.0) * lambda * table.T_values[j] -
                          lambda * table.tau_values[i];
        }
    }
    return out;
}

MonotonicityReport monotonicity_report(const SweepTable& table) {
    MonotonicityReport rep;
    // Along each row the error should not grow with T.
    for (int i = 0; i < table.rows(); ++i) {
        int prev = -1;
        for (int j = 0; j < table.cols(); ++j) {
            if (!table.has_value(i, j)) continue;
            if (prev >= 0 && table.value(i, j) > table.value(i, prev)) {
                rep.violations.push_back({table.tau_values[i], table.T_values[j],
                                          "row",
                                          table.value(i, j) - table.value(i, prev)});
            }
            prev = j;
        }
    }
    // Down each column the error should not shrink with tau.
    for (int j = 0; j < table.cols(); ++j) {
        int prev = -1;
        for (int i = 0; i < table.rows(); ++i) {
            if (!table.has_value(i, j)) continue;
            if (prev >= 0 && table.value(i, j) < table.value(prev, j)) {
                rep.violations.push_back({table.tau_values[i], table.T_values[j],
                                          "column",
                                          table.value(prev, j) - table.value(i, j)});
            }
            prev = i;
        }
    }
    return rep;
}

MonotonicityReport monotonicity_report(const std::vector<SweepTable>& tables) {
    MonotonicityReport rep;
    for (size_t t = 0; t + 1 < tables.size(); ++t) {
        const SweepTable& lo = tables[t];
        const SweepTable& hi = tables[t + 1];
        if (lo.tau_values != hi.tau_values || lo.T_values != hi.T_values) {
            throw InvalidInputError(
                "cross-table monotonicity needs identical grids");
        }
        for (int i = 0; i < lo.rows(); ++i) {
            for (int j = 0; j < lo.cols(); ++j) {
                if (!lo.has_value(i, j) || !hi.has_value(i, j)) continue;
                if (hi.value(i, j) > lo.value(i, j)) {
                    rep.violations.push_back({lo.tau_values[i], lo.T_values[j],
                                              "cross",
                                              hi.value(i, j) - lo.value(i, j)});
                }
            }
        }
    }
    return rep;
}

// --- formatting ------------------------------------------------------------

namespace {

// Shortest plain rendering for grid labels (0.1, 2.8, ...).
std::string format_label(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%g", v);
    return buf;
}

std::string format_full(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

// RFC-4180 field quoting.
std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

}  // namespace

std::string format_cell(const std::optional<Cell>& cell) {
    if (!cell.has_value()) return "";
    if (!cell->value.has_value()) return "!" + cell->error;
    const double v = *cell->value;
    if (!std::isfinite(v)) return v > 0 ? "inf" : (v < 0 ? "-inf" : "nan");
    if (v == 0.0) return "0.0e+0";
    const double av = std::abs(v);
    int e = static_cast<int>(std::floor(std::log10(av)));
    double m = av / std::pow(10.0, e);
    char mant[16];
    std::snprintf(mant, sizeof(mant), "%.1f", m);
    if (std::string(mant) == "10.0") {
        ++e;
        std::snprintf(mant, sizeof(mant), "%.1f", 1.0);
    }
    std::ostringstream out;
    if (v < 0) out << '-';
    out << mant << 'e' << (e < 0 ? '-' : '+') << std::abs(e);
    return out.str();
}

std::string to_text(const SweepTable& table, TableFormat format) {
    std::ostringstream out;
    if (format == TableFormat::csv) {
        out << "label," << csv_field(table.label) << "\n";
        out << "lambda," << format_full(table.lambda) << "\n";
        out << "reference_certificate," << format_full(table.reference_certificate)
            << "\n";
        out << "tau/T";
        for (double T : table.T_values) out << "," << csv_field(format_label(T));
        out << "\n";
        for (int i = 0; i < table.rows(); ++i) {
            out << csv_field(format_label(table.tau_values[i]));
            for (int j = 0; j < table.cols(); ++j) {
                out << "," << csv_field(format_cell(table.cells[i][j]));
            }
            out << "\n";
        }
        return out.str();
    }
    // Markdown grid.
    out << "## " << table.label << " (lambda = " << format_full(table.lambda)
        << ", reference certificate = " << format_full(table.reference_certificate)
        << ")\n\n";
    out << "| tau\\T |";
    for (double T : table.T_values) out << " " << format_label(T) << " |";
    out << "\n|---|";
    for (size_t j = 0; j < table.T_values.size(); ++j) out << "---|";
    out << "\n";
    for (int i = 0; i < table.rows(); ++i) {
        out << "| " << format_label(table.tau_values[i]) << " |";
        for (int j = 0; j < table.cols(); ++j) {
            const std::string cell = format_cell(table.cells[i][j]);
            out << " " << (cell.empty() ? " " : cell) << " |";
        }
        out << "\n";
    }
    return out.str();
}

void export_table(const SweepTable& table, const std::string& path,
                  TableFormat format) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open for writing: " + path);
    f << to_text(table, format);
    if (!f) throw IoError("write failed: " + path);
}

namespace {

// Minimal RFC-4180 reader: rows of unquoted/quoted fields.
std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
    std::vector<std::vector<std::string>> rows;
    std::vector<std::string> row;
    std::string field;
    bool quoted = false;
    bool any = false;
    for (size_t i = 0; i < text.size(); ++i) {
        const char c = text[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') {
                    field += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                field += c;
            }
            continue;
        }
        if (c == '"' && field.empty()) {
            quoted = true;
            any = true;
        } else if (c == ',') {
            row.push_back(std::move(field));
            field.clear();
            any = true;
        } else if (c == '\n' || c == '\r') {
            if (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n') ++i;
            if (any || !field.empty() || !row.empty()) {
                row.push_back(std::move(field));
                field.clear();
                rows.push_back(std::move(row));
                row.clear();
                any = false;
            }
        } else {
            field += c;
            any = true;
        }
    }
    if (any || !field.empty() || !row.empty()) {
        row.push_back(std::move(field));
        rows.push_back(std::move(row));
    }
    return rows;
}

double parse_number(const std::string& s, const std::string& context) {
    try {
        size_t pos = 0;
        const double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw IoError("cannot parse number '" + s + "' in " + context);
    }
}

}  // namespace

SweepTable import_table_csv(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open for reading: " + path);
    std::ostringstream buf;
    buf << f.rdbuf();
    const auto rows = parse_csv(buf.str());
    if (rows.size() < 4 || rows[0].size() < 2 || rows[0][0] != "label" ||
        rows[1].size() < 2 || rows[1][0] != "lambda" || rows[2].size() < 2 ||
        rows[2][0] != "reference_certificate" || rows[3].empty() ||
        rows[3][0] != "tau/T") {
        throw IoError("malformed sweep table CSV: " + path);
    }
    SweepTable t;
    t.label = rows[0][1];
    t.lambda = parse_number(rows[1][1], "lambda");
    t.reference_certificate = parse_number(rows[2][1], "reference_certificate");
    for (size_t j = 1; j < rows[3].size(); ++j) {
        t.T_values.push_back(parse_number(rows[3][j], "T header"));
    }
    for (size_t r = 4; r < rows.size(); ++r) {
        if (rows[r].size() != rows[3].size()) {
            throw IoError("ragged row in sweep table CSV: " + path);
        }
        t.tau_values.push_back(parse_number(rows[r][0], "tau label"));
        std::vector<std::optional<Cell>> line;
        for (size_t j = 1; j < rows[r].size(); ++j) {
            const std::string& s = rows[r][j];
            if (s.empty()) {
                line.emplace_back();
            } else if (s[0] == '!') {
                Cell c;
                c.error = s.substr(1);
                line.emplace_back(std::move(c));
            } else {
                Cell c;
                c.value = parse_number(s, "cell");
                line.emplace_back(std::move(c));
            }
        }
        t.cells.push_back(std::move(line));
    }
    return t;
}

}  // namespace rhc
