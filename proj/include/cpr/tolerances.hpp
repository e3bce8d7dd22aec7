#pragma once

namespace cpr {

// Numerical thresholds shared across the recovery pipeline. All *_rel values
// are relative to the natural scale of the quantity they gate.
struct Tolerances {
  double coeff_nonzero_rel = 1e-10;  // "nonzero" tests in decompose/is_cpr
  double am_zero_rel = 1e-8;         // index searches on the A_m sequence
  double identity_rel = 1e-6;        // derivative/function A_m consistency
  double anchor_rel = 1e-8;          // |Im(w_a conj w_b)| threshold vs max|w|^2
  double sigma_margin = 10.0;        // residual ratio deciding conjugation
  double overlap_rel = 0.2;          // inconsistent-blocks gate
  double gram_rank_rel = 1e-6;       // third eigenvalue vs trace
  double basis_rank_rel = 1e-9;      // greedy node selection rank threshold
  double cond_warn = 1e12;           // Vandermonde condition warning
};

}  // namespace cpr
