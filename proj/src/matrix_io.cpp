#include <charconv>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <fmt/format.h>

#include "cpdyn/hamiltonian.hpp"

namespace cpdyn {

namespace {

double parse_real(std::string_view s, const std::string& path, int line) {
    double v = 0;
    const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || end != s.data() + s.size())
        throw ConfigParse(fmt::format("{}:{}: bad matrix entry '{}'", path, line, s));
    return v;
}

std::string_view trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
}

} // namespace

HermitianOperator<double> load_matrix_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw FileIO("cannot open matrix file " + path);
    EnergyUnit unit = EnergyUnit::Dimensionless;
    std::vector<std::vector<Complex<double>>> rows;
    std::string raw;
    for (int line = 1; std::getline(in, raw); ++line) {
        std::string_view text = trim(raw);
        if (text.empty()) continue;
        if (text.front() == '#') {
            text = trim(text.substr(1));
            if (text.starts_with("unit:")) {
                const auto u = trim(text.substr(5));
                if (u == "cm-1")
                    unit = EnergyUnit::Wavenumber;
                else if (u == "dimensionless")
                    unit = EnergyUnit::Dimensionless;
                else
                    throw ConfigParse(fmt::format("{}:{}: unknown unit '{}'", path, line, u));
            }
            continue;
        }
        std::istringstream fields{std::string(text)};
        std::vector<Complex<double>> row;
        for (std::string tok; fields >> tok;) {
            const auto comma = tok.find(',');
            if (comma == std::string::npos) {
                row.emplace_back(parse_real(tok, path, line), 0.0);
            } else {
                const std::string_view sv(tok);
                row.emplace_back(parse_real(sv.substr(0, comma), path, line), parse_real(sv.substr(comma + 1), path, line));
            }
        }
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw ConfigParse(path + ": empty matrix");
    const auto n = static_cast<Index>(rows.size());
    CMatrix<double> m(n, n);
    for (Index i = 0; i < n; ++i) {
        const auto& row = rows[static_cast<std::size_t>(i)];
        if (static_cast<Index>(row.size()) != n)
            throw ConfigParse(fmt::format("{}: row {} has {} entries, expected {}", path, i, row.size(), n));
        for (Index j = 0; j < n; ++j) m(i, j) = row[static_cast<std::size_t>(j)];
    }
    try {
        return HermitianOperator<double>(std::move(m), unit);
    } catch (const Error& e) {
        throw ConfigParse(path + ": " + e.what());
    }
}

void save_matrix_file(const HermitianOperator<double>& h, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw FileIO("cannot write matrix file " + path);
    out << "# unit: " << unit_name(h.unit()) << '\n';
    const auto& m = h.matrix();
    for (Index i = 0; i < m.rows(); ++i) {
        for (Index j = 0; j < m.cols(); ++j) {
            if (j) out << ' ';
            const auto z = m(i, j);
            if (z.imag() == 0.0)
                out << fmt::format("{:.17g}", z.real());
            else
                out << fmt::format("{:.17g},{:.17g}", z.real(), z.imag());
        }
        out << '\n';
    }
    if (!out) throw FileIO("failed writing " + path);
}

} // namespace cpdyn
