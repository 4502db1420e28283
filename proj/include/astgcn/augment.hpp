#pragma once

#include <vector>

#include "astgcn/dataset.hpp"
#include "astgcn/types.hpp"

namespace astgcn {

/// Attribute-augmentation switches. The derived feature width is
/// 1 + p*use_static + w*(m+1)*use_dynamic; width 1 is the attribute-free
/// (TGCN) degenerate case. The column order is fixed:
/// [x_t | S | D_1^{t-m..t} | ... | D_w^{t-m..t}], each dynamic channel in
/// ascending time order — checkpoint compatibility depends on it.
struct AugmentSpec {
  bool use_static = true;
  bool use_dynamic = true;
  int window_m = 2;  // trailing dynamic steps beyond the current one

  Index width(Index static_width, Index dynamic_width) const {
    return 1 + (use_static ? static_width : 0) +
           (use_dynamic ? dynamic_width * (window_m + 1) : 0);
  }
};

/// Builds the augmented matrix for one time step. Dynamic indices before the
/// start of the series are padded by replicating index 0.
/// Errors: shape_mismatch, index_out_of_range.
Matrix augment_step(const Vector& x_t, const Matrix& static_attrs,
                    const std::vector<Matrix>& dynamic_attrs, Index t,
                    const AugmentSpec& spec);

/// Augmented matrices for each input step of one window.
std::vector<Matrix> augment_sequence(const Matrix& normalized_speeds,
                                     const AttributeBundle& attrs,
                                     const AugmentSpec& spec,
                                     const WindowedSample& window);

/// Augmented matrices for every time step of the series (E_t depends only on
/// t, so windows can share this precomputation).
std::vector<Matrix> augment_series(const Matrix& normalized_speeds,
                                   const AttributeBundle& attrs,
                                   const AugmentSpec& spec);

}  // namespace astgcn
