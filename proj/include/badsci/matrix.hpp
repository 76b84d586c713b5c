// Row and matrix representations. Rows are either exact integer directions
// (an integer vector c standing for the unit row c/sqrt(N), N = |c|^2) or
// unit-normalized float vectors. Hypercube vertices are n-bit masks with
// bit j set iff coordinate j equals +1.
#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "badsci/surd.hpp"

namespace badsci {

using VertexMask = std::uint32_t;

inline int vertex_coord(VertexMask x, int j) { return (x >> j) & 1u ? 1 : -1; }
inline VertexMask vertex_negate(VertexMask x, int n) {
    return ~x & ((n >= 32 ? ~VertexMask(0) : (VertexMask(1) << n) - 1));
}

struct IntRow {
    std::vector<Integer> c;  // nonzero integer direction
    Integer norm_sq;         // cached sum of c_j^2

    explicit IntRow(std::vector<Integer> entries);
    int n() const { return static_cast<int>(c.size()); }
};

struct FloatRow {
    std::vector<double> v;  // unit l2 norm within 1e-9
    int n() const { return static_cast<int>(v.size()); }
};

// Primitive integer direction: entries divided by their gcd, sign fixed so the
// first nonzero entry is positive. Rows proportional up to sign map to the
// same CanonicalRow.
struct CanonicalRow {
    std::vector<Integer> p;
    Integer norm_sq;

    bool operator==(const CanonicalRow& o) const { return p == o.p; }
    bool operator<(const CanonicalRow& o) const { return p < o.p; }
};

enum class RowKind { Int, Float };

class Matrix {
  public:
    static Matrix from_int_rows(std::vector<std::vector<Integer>> rows, std::string label = "");
    // Rows must be unit within `tolerance` of 1 unless force_normalize is set;
    // either way they are renormalized to unit before storage.
    static Matrix from_float_rows(std::vector<std::vector<double>> rows, std::string label = "",
                                  bool force_normalize = false, double tolerance = 1e-6,
                                  std::vector<std::string>* warnings = nullptr);

    RowKind kind() const { return kind_; }
    int m() const { return m_; }
    int n() const { return n_; }
    const std::string& label() const { return label_; }
    void set_label(std::string label) { label_ = std::move(label); }

    const std::vector<IntRow>& int_rows() const;
    const std::vector<FloatRow>& float_rows() const;

    // Unit rows as doubles regardless of kind.
    std::vector<std::vector<double>> unit_rows_double() const;

    bool operator==(const Matrix& o) const;

    // An empty matrix (m = 0); only the factory methods produce usable ones.
    Matrix() = default;

  private:
    RowKind kind_ = RowKind::Int;
    int m_ = 0, n_ = 0;
    std::string label_;
    std::vector<IntRow> irows_;
    std::vector<FloatRow> frows_;
};

// Sum of the vertices in V as an integer row; nullopt when the sum vanishes
// (the zero row is a value here, not an error).
std::optional<IntRow> row_from_subset(std::span<const VertexMask> vertices, int n);

CanonicalRow canonical_row(const IntRow& row);

// JSON form: {"m":2,"n":2,"rows":[{"int_vec":[1,1]},{"int_vec":[1,-1]}]} or
// float_vec rows; mixed kinds are rejected. Entries beyond double-exact range
// may be strings.
Matrix parse_matrix(const std::string& text, bool force_normalize = false,
                    std::vector<std::string>* warnings = nullptr);
std::string serialize_matrix(const Matrix& a, bool pretty = false);

}  // namespace badsci
