#pragma once

#include <cmath>
#include <cstdint>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "nlvol/rng.hpp"
#include "nlvol/scenario.hpp"

namespace nlvol {

// Linear functional on behaviors: full-body correlator coefficients indexed
// by setting tuple, plus per-party single-body (marginal) coefficients.
// An inequality with all marginal coefficients exactly zero is a
// correlation (full-correlator / XOR-game) inequality.
struct BellInequality {
    Scenario scenario;
    std::vector<double> joint;                   // [setting_index]
    std::vector<std::vector<double>> marginal;   // [party][setting]
    std::optional<double> local_bound;           // known bound, if any

    BellInequality(Scenario sc, std::vector<double> joint_coeffs,
                   std::vector<std::vector<double>> marginal_coeffs,
                   std::optional<double> bound = std::nullopt)
        : scenario(std::move(sc)),
          joint(std::move(joint_coeffs)),
          marginal(std::move(marginal_coeffs)),
          local_bound(bound) {
        if (static_cast<std::int64_t>(joint.size()) != scenario.setting_tuples())
            throw std::invalid_argument("BellInequality: joint coefficient count mismatch");
        if (static_cast<int>(marginal.size()) != scenario.parties())
            throw std::invalid_argument("BellInequality: need one marginal array per party");
        for (int p = 0; p < scenario.parties(); ++p)
            if (static_cast<int>(marginal[p].size()) != scenario.settings(p))
                throw std::invalid_argument("BellInequality: marginal length mismatch");
    }

    bool is_correlation_inequality() const {
        for (const auto& party : marginal)
            for (double g : party)
                if (g != 0.0) return false;
        return true;
    }
};

// <A0B0> + <A0B1> + <A1B0> - <A1B1> <= 2.
inline BellInequality chsh() {
    Scenario sc({2, 2});
    std::vector<double> joint{1.0, 1.0, 1.0, -1.0};  // index x*2 + y
    return BellInequality(std::move(sc), std::move(joint), {{0.0, 0.0}, {0.0, 0.0}}, 2.0);
}

// Correlation inequality with i.i.d. standard-normal joint coefficients.
inline BellInequality random_correlation_inequality(const Scenario& scenario, CounterRng& rng) {
    std::vector<double> joint(scenario.setting_tuples());
    for (double& g : joint) g = rng.normal();
    std::vector<std::vector<double>> marg(scenario.parties());
    for (int p = 0; p < scenario.parties(); ++p) marg[p].assign(scenario.settings(p), 0.0);
    return BellInequality(scenario, std::move(joint), std::move(marg));
}

// --- CSV format (bipartite, Collins-Gisin layout) ---------------------------
//
//   # g_loc: 2            optional sidecar line carrying the local bound
//   ,gA0,gA1,...          first row: A-marginal coefficients, top-left empty
//   gB0,g00,g10,...       row y: B-marginal coefficient, then joint g_xy
//   gB1,g01,g11,...
//
// Body cell (row y, column x) holds the coefficient of <A_x B_y>.

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            fields.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur += c;
        }
    }
    fields.push_back(cur);
    return fields;
}

inline double parse_coeff(const std::string& s) {
    if (s.empty()) return 0.0;
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
    if (pos != s.size()) throw std::invalid_argument("inequality CSV: bad number '" + s + "'");
    return v;
}

}  // namespace detail

inline BellInequality read_inequality_csv(std::istream& in) {
    std::optional<double> bound;
    std::vector<std::vector<std::string>> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line.find_first_not_of(" \t\r") == std::string::npos) continue;
        if (line[0] == '#') {
            const auto pos = line.find("g_loc");
            if (pos != std::string::npos) {
                const auto colon = line.find_first_of(":=", pos);
                if (colon != std::string::npos)
                    bound = detail::parse_coeff(line.substr(colon + 1));
            }
            continue;
        }
        rows.push_back(detail::split_csv_line(line));
    }
    if (rows.size() < 2) throw std::invalid_argument("inequality CSV: need marginal row plus body");
    const std::size_t width = rows[0].size();
    if (width < 2) throw std::invalid_argument("inequality CSV: need at least one A setting");
    for (const auto& r : rows)
        if (r.size() != width) throw std::invalid_argument("inequality CSV: ragged rows");
    if (!rows[0][0].empty())
        throw std::invalid_argument("inequality CSV: top-left cell must be empty");

    const int m_a = static_cast<int>(width - 1);
    const int m_b = static_cast<int>(rows.size() - 1);
    Scenario sc({m_a, m_b});
    std::vector<std::vector<double>> marg(2);
    for (int x = 0; x < m_a; ++x) marg[0].push_back(detail::parse_coeff(rows[0][x + 1]));
    std::vector<double> joint(static_cast<std::size_t>(m_a) * m_b);
    marg[1].resize(m_b);
    for (int y = 0; y < m_b; ++y) {
        marg[1][y] = detail::parse_coeff(rows[y + 1][0]);
        for (int x = 0; x < m_a; ++x)
            joint[static_cast<std::size_t>(x) * m_b + y] = detail::parse_coeff(rows[y + 1][x + 1]);
    }
    return BellInequality(std::move(sc), std::move(joint), std::move(marg), bound);
}

inline BellInequality read_inequality_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open inequality file: " + path);
    return read_inequality_csv(in);
}

inline void write_inequality_csv(std::ostream& out, const BellInequality& ineq) {
    if (ineq.scenario.parties() != 2)
        throw std::invalid_argument("inequality CSV: bipartite only");
    const int m_a = ineq.scenario.settings(0);
    const int m_b = ineq.scenario.settings(1);
    char buf[64];
    auto fmt = [&](double v) {
        std::snprintf(buf, sizeof buf, "%.17g", v);
        return std::string(buf);
    };
    if (ineq.local_bound) out << "# g_loc: " << fmt(*ineq.local_bound) << "\n";
    for (int x = 0; x < m_a; ++x) out << ',' << fmt(ineq.marginal[0][x]);
    out << "\n";
    for (int y = 0; y < m_b; ++y) {
        out << fmt(ineq.marginal[1][y]);
        for (int x = 0; x < m_a; ++x)
            out << ',' << fmt(ineq.joint[static_cast<std::size_t>(x) * m_b + y]);
        out << "\n";
    }
}

}  // namespace nlvol
