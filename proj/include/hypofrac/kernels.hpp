#pragma once

#include <span>

#include "hypofrac/common.hpp"
#include "hypofrac/parallel.hpp"

// Inner loops shared by several modules. Each kernel has one implementation
// whose outer loop runs either serially or under OpenMP; per-index partial
// results are reduced in index order so both modes agree bit for bit.
namespace hypofrac::kernels {

/// sum_{j,k} w[|j-k|] <phi_j, psi_k> for column-valued cells (rows = components).
double toeplitz_bilinear(std::span<const double> w, const Mat& phi, const Mat& psi,
                         Exec exec = default_exec());

/// S_u = sum_v w[|u-v|] M_v over columns.
Mat toeplitz_apply(std::span<const double> w, const Mat& m, Exec exec = default_exec());

/// out_i = sum_{k < min(i, cols)} w[i-k] x_k, i = 0..out_len-1, applied row-wise.
Mat lower_toeplitz_apply(std::span<const double> w, const Mat& x, std::size_t out_len,
                         Exec exec = default_exec());

/// max_{i<j} |v_j - v_i| / ((j-i) * mesh)^alpha with Euclidean norm across rows.
double holder_seminorm(const Mat& values, double mesh, double alpha, Exec exec = default_exec());

}  // namespace hypofrac::kernels
