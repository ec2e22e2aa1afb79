#pragma once

#include <utility>
#include <vector>

#include "saprek/dense.hpp"

namespace saprek {

/// Consistent saddle-point embedding of A x = b:
///   M = [[A^T, 0], [I, A]],  c = (0_n; b),
/// whose solution stacks z* = (I - A A^+) b and x* = A^+ b.
struct EmbeddedSystem {
    Mat m;       // (n + a_rows) x (a_rows + n)
    Vec c;       // (0_n; b)
    int a_rows;  // m of the original system
    int a_cols;  // n of the original system
};

EmbeddedSystem build_embedded_system(const Mat& a, const Vec& b);

/// Block sketch S = blockdiag(I_:j, I_:i) stored as the index pair.
/// Row j selects the j-th equation of A^T z = 0, row a_cols + i selects
/// the i-th equation of z + A x = b.
struct SketchMatrix {
    int j = 0;  // column index of A, in [0, a_cols)
    int i = 0;  // row index of A, in [0, a_rows)
    int a_rows = 0;
    int a_cols = 0;

    Mat dense() const;  // (a_cols + a_rows) x 2, exactly two unit entries
};

/// Projection metric B_eps = blockdiag(I_m, eps * I_n), stored diagonally.
struct ProjectionMetric {
    double eps = 1.0;
    int a_rows = 0;
    int a_cols = 0;

    Vec diagonal() const;
    Mat dense() const;
};

/// Generic sketch-and-project update: the B-norm projection of y onto
/// the solution space of S^T M y = S^T c,
///   y' = y - B^{-1} M^T S (S^T M B^{-1} M^T S)^+ S^T (M y - c).
/// This is the reference (oracle) path; structured arguments are
/// expanded to dense before use.
Vec sap_step(const Mat& m, const Vec& c, const Mat& b_spd, const Mat& s, const Vec& y);
Vec sap_step(const EmbeddedSystem& sys, const ProjectionMetric& b, const SketchMatrix& s,
             const Vec& y);

/// REK's paired update evaluated in its single matrix form: the update
/// route goes through the projected residual row e_i^T (I - A_:j A_:j^T /
/// |A_:j|^2), not through the updated z vector.
std::pair<Vec, Vec> rek_matrix_step(const Mat& a, const Vec& b, const Vec& z, const Vec& x,
                                    int i, int j);

/// Update matrix Z = M^T S (S^T M B^{-1} M^T S)^+ S^T M.
Mat update_matrix_Z(const Mat& m, const Mat& b_spd, const Mat& s);
Mat update_matrix_Z(const EmbeddedSystem& sys, const ProjectionMetric& b, const SketchMatrix& s);

/// Off-diagonal block diagnostics of B^{-1} Z for block-diagonal B with
/// leading block of size top_rows. For each Z the report carries the
/// max-abs entries of the top-right and bottom-left blocks and whether
/// "top-right vanishes iff bottom-left vanishes" holds at the tolerance.
struct BlockStructureEntry {
    double top_right_max;
    double bottom_left_max;
    bool zero_equivalent;
};

struct BlockStructureReport {
    std::vector<BlockStructureEntry> entries;
    bool all_equivalent = true;
    double tolerance = 1e-10;
};

BlockStructureReport block_structure_report(const std::vector<Mat>& zs, const Mat& b,
                                            int top_rows, double tolerance = 1e-10);

} // namespace saprek
