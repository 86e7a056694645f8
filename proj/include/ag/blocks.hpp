#pragma once

#include "ag/tensor.hpp"

namespace ag {

/// The four blocks of the curvature of the standard tractor connection in a
/// Weyl splitting. Form slots first, two (EUp,FDown) pairs, then value slots:
///   torsion      value (FUp,EDown)   -- the TM block
///   weyl_e       value (EUp,EDown)   -- E-endomorphism block
///   weyl_f       value (FUp,FDown)   -- F-endomorphism block
///   cotton_york  value (EUp,FDown)   -- the T*M block
struct CurvatureBlocks {
  IndexedTensor torsion;
  IndexedTensor weyl_e;
  IndexedTensor weyl_f;
  IndexedTensor cotton_york;
};

inline const std::vector<Slot>& form_slots() {
  static const std::vector<Slot> s{Slot::EUp, Slot::FDown, Slot::EUp, Slot::FDown};
  return s;
}

inline std::vector<Slot> block_slots(Slot value_up, Slot value_down) {
  std::vector<Slot> s = form_slots();
  s.push_back(value_up);
  s.push_back(value_down);
  return s;
}

inline CurvatureBlocks zero_blocks(int n, int nvars) {
  return {IndexedTensor(n, nvars, block_slots(Slot::FUp, Slot::EDown)),
          IndexedTensor(n, nvars, block_slots(Slot::EUp, Slot::EDown)),
          IndexedTensor(n, nvars, block_slots(Slot::FUp, Slot::FDown)),
          IndexedTensor(n, nvars, block_slots(Slot::EUp, Slot::FDown))};
}

inline void require_block_slots(const CurvatureBlocks& k, const char* op) {
  if (k.torsion.slots() != block_slots(Slot::FUp, Slot::EDown) ||
      k.weyl_e.slots() != block_slots(Slot::EUp, Slot::EDown) ||
      k.weyl_f.slots() != block_slots(Slot::FUp, Slot::FDown) ||
      k.cotton_york.slots() != block_slots(Slot::EUp, Slot::FDown))
    throw std::invalid_argument(std::string(op) + ": slot mismatch in curvature blocks");
}

/// Antisymmetry of a block under the swap of its two form pairs.
inline bool is_form_antisymmetric(const IndexedTensor& block) {
  std::vector<int> perm{2, 3, 0, 1};
  for (int k = 4; k < block.rank(); ++k) perm.push_back(k);
  return transpose(block, perm) == -block;
}

inline bool blocks_form_antisymmetric(const CurvatureBlocks& k) {
  return is_form_antisymmetric(k.torsion) && is_form_antisymmetric(k.weyl_e) &&
         is_form_antisymmetric(k.weyl_f) && is_form_antisymmetric(k.cotton_york);
}

/// The endomorphism blocks take values in s(L(E,E) + L(F,F)): the E-trace of
/// weyl_e plus the F-trace of weyl_f vanishes in every form component.
inline bool blocks_trace_compatible(const CurvatureBlocks& k) {
  const IndexedTensor tr = contract(k.weyl_e, 4, 5) + contract(k.weyl_f, 4, 5);
  return tr.is_zero();
}

}  // namespace ag
