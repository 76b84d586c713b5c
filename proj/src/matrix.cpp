#include "badsci/matrix.hpp"

#include <cmath>
#include <cstdlib>

#include <json.hpp>

namespace badsci {

IntRow::IntRow(std::vector<Integer> entries) : c(std::move(entries)) {
    bool all_zero = true;
    norm_sq = 0;
    for (const Integer& v : c) {
        norm_sq += v * v;
        if (v != 0) all_zero = false;
    }
    if (c.empty() || all_zero) throw std::invalid_argument("IntRow: zero row");
}

Matrix Matrix::from_int_rows(std::vector<std::vector<Integer>> rows, std::string label) {
    if (rows.empty()) throw ParseError("matrix has no rows");
    Matrix a;
    a.kind_ = RowKind::Int;
    a.m_ = static_cast<int>(rows.size());
    a.n_ = static_cast<int>(rows[0].size());
    if (a.n_ == 0) throw ParseError("matrix has zero columns");
    a.label_ = std::move(label);
    a.irows_.reserve(rows.size());
    for (auto& r : rows) {
        if (static_cast<int>(r.size()) != a.n_) throw ParseError("row length mismatch");
        a.irows_.emplace_back(std::move(r));
    }
    return a;
}

Matrix Matrix::from_float_rows(std::vector<std::vector<double>> rows, std::string label,
                               bool force_normalize, double tolerance,
                               std::vector<std::string>* warnings) {
    if (rows.empty()) throw ParseError("matrix has no rows");
    Matrix a;
    a.kind_ = RowKind::Float;
    a.m_ = static_cast<int>(rows.size());
    a.n_ = static_cast<int>(rows[0].size());
    if (a.n_ == 0) throw ParseError("matrix has zero columns");
    a.label_ = std::move(label);
    a.frows_.reserve(rows.size());
    for (size_t i = 0; i < rows.size(); ++i) {
        auto& r = rows[i];
        if (static_cast<int>(r.size()) != a.n_) throw ParseError("row length mismatch");
        double nrm = 0;
        for (double v : r) {
            if (!std::isfinite(v)) throw ParseError("non-finite entry in row " + std::to_string(i));
            nrm += v * v;
        }
        nrm = std::sqrt(nrm);
        if (nrm == 0) throw ParseError("zero row " + std::to_string(i));
        double dev = std::abs(nrm - 1.0);
        if (dev > tolerance && !force_normalize)
            throw ParseError("row " + std::to_string(i) + " has norm " + std::to_string(nrm) +
                             ", more than " + std::to_string(tolerance) +
                             " away from 1 (pass normalize to accept)");
        if (dev > 1e-12 && warnings)
            warnings->push_back("row " + std::to_string(i) + " renormalized (norm deviation " +
                                std::to_string(dev) + ")");
        // normalization is idempotent: rows already unit to machine precision
        // keep their bits, so serialize/parse round-trips exactly
        if (dev > 1e-13)
            for (double& v : r) v /= nrm;
        a.frows_.push_back(FloatRow{std::move(r)});
    }
    return a;
}

const std::vector<IntRow>& Matrix::int_rows() const {
    if (kind_ != RowKind::Int) throw std::logic_error("matrix does not have integer rows");
    return irows_;
}

const std::vector<FloatRow>& Matrix::float_rows() const {
    if (kind_ != RowKind::Float) throw std::logic_error("matrix does not have float rows");
    return frows_;
}

std::vector<std::vector<double>> Matrix::unit_rows_double() const {
    std::vector<std::vector<double>> out;
    out.reserve(m_);
    if (kind_ == RowKind::Float) {
        for (const auto& r : frows_) out.push_back(r.v);
        return out;
    }
    for (const auto& r : irows_) {
        double inv = 1.0 / std::sqrt(r.norm_sq.get_d());
        std::vector<double> v(n_);
        for (int j = 0; j < n_; ++j) v[j] = r.c[j].get_d() * inv;
        out.push_back(std::move(v));
    }
    return out;
}

bool Matrix::operator==(const Matrix& o) const {
    if (kind_ != o.kind_ || m_ != o.m_ || n_ != o.n_) return false;
    if (kind_ == RowKind::Int) {
        for (int i = 0; i < m_; ++i)
            if (irows_[i].c != o.irows_[i].c) return false;
        return true;
    }
    for (int i = 0; i < m_; ++i)
        if (frows_[i].v != o.frows_[i].v) return false;
    return true;
}

std::optional<IntRow> row_from_subset(std::span<const VertexMask> vertices, int n) {
    std::vector<long> sums(n, 0);
    for (VertexMask x : vertices)
        for (int j = 0; j < n; ++j) sums[j] += vertex_coord(x, j);
    bool all_zero = true;
    for (long s : sums)
        if (s != 0) all_zero = false;
    if (all_zero) return std::nullopt;
    std::vector<Integer> c(n);
    for (int j = 0; j < n; ++j) c[j] = sums[j];
    return IntRow(std::move(c));
}

CanonicalRow canonical_row(const IntRow& row) {
    Integer g = 0;
    for (const Integer& v : row.c) mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), v.get_mpz_t());
    CanonicalRow out;
    out.p.reserve(row.c.size());
    int flip = 0;
    for (const Integer& v : row.c) {
        Integer e = v / g;
        if (flip == 0 && e != 0) flip = sgn(e);
        out.p.push_back(std::move(e));
    }
    if (flip < 0)
        for (Integer& e : out.p) e = -e;
    out.norm_sq = 0;
    for (const Integer& e : out.p) out.norm_sq += e * e;
    return out;
}

namespace {

Integer integer_from_json(const nlohmann::json& v) {
    if (v.is_number_integer()) return Integer(static_cast<long>(v.get<std::int64_t>()));
    if (v.is_string()) {
        Integer z;
        if (mpz_set_str(z.get_mpz_t(), v.get<std::string>().c_str(), 10) != 0)
            throw ParseError("bad integer entry: " + v.get<std::string>());
        return z;
    }
    throw ParseError("int_vec entries must be integers");
}

nlohmann::ordered_json integer_to_json(const Integer& z) {
    if (z.fits_slong_p()) return nlohmann::ordered_json(z.get_si());
    return nlohmann::ordered_json(z.get_str());
}

}  // namespace

Matrix parse_matrix(const std::string& text, bool force_normalize,
                    std::vector<std::string>* warnings) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("bad matrix JSON: ") + e.what());
    }
    if (!j.is_object() || !j.contains("rows") || !j["rows"].is_array() || j["rows"].empty())
        throw ParseError("matrix JSON needs a non-empty \"rows\" array");
    std::string label = j.value("label", std::string{});

    bool has_int = false, has_float = false;
    for (const auto& row : j["rows"]) {
        if (row.contains("int_vec")) has_int = true;
        else if (row.contains("float_vec")) has_float = true;
        else throw ParseError("row needs either int_vec or float_vec");
    }
    if (has_int && has_float) throw ParseError("mixed int_vec/float_vec rows are not allowed");

    Matrix a = [&] {
        if (has_int) {
            std::vector<std::vector<Integer>> rows;
            for (const auto& row : j["rows"]) {
                std::vector<Integer> r;
                for (const auto& v : row["int_vec"]) r.push_back(integer_from_json(v));
                if (r.empty()) throw ParseError("empty row");
                rows.push_back(std::move(r));
            }
            return Matrix::from_int_rows(std::move(rows), label);
        }
        std::vector<std::vector<double>> rows;
        for (const auto& row : j["rows"]) {
            std::vector<double> r;
            for (const auto& v : row["float_vec"]) {
                if (!v.is_number()) throw ParseError("float_vec entries must be numbers");
                r.push_back(v.get<double>());
            }
            if (r.empty()) throw ParseError("empty row");
            rows.push_back(std::move(r));
        }
        return Matrix::from_float_rows(std::move(rows), label, force_normalize, 1e-6, warnings);
    }();

    if (j.contains("m") && j["m"].get<int>() != a.m()) throw ParseError("declared m mismatch");
    if (j.contains("n") && j["n"].get<int>() != a.n()) throw ParseError("declared n mismatch");
    return a;
}

std::string serialize_matrix(const Matrix& a, bool pretty) {
    nlohmann::ordered_json j;
    j["m"] = a.m();
    j["n"] = a.n();
    if (!a.label().empty()) j["label"] = a.label();
    j["rows"] = nlohmann::ordered_json::array();
    if (a.kind() == RowKind::Int) {
        for (const auto& r : a.int_rows()) {
            nlohmann::ordered_json row;
            row["int_vec"] = nlohmann::ordered_json::array();
            for (const auto& v : r.c) row["int_vec"].push_back(integer_to_json(v));
            j["rows"].push_back(std::move(row));
        }
    } else {
        for (const auto& r : a.float_rows()) {
            nlohmann::ordered_json row;
            row["float_vec"] = r.v;
            j["rows"].push_back(std::move(row));
        }
    }
    return pretty ? j.dump(2) : j.dump();
}

}  // namespace badsci
