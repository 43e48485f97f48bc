#pragma once

#include <vector>

#include "tcsim/device_model.hpp"

namespace tcsim {

/// Eigenstates of a static Hamiltonian indexed by the bare label they overlap most.
struct DressedStates {
  RVec energies;            // energies(i): eigenvalue assigned to bare label i
  RMat vectors;             // column i: eigenvector assigned to label i, <i|v_i> > 0
  RVec overlaps;            // |<i|v_i>|^2
};

/// Diagonalizes h sector by sector and assigns labels greedily by overlap.
DressedStates label_eigenstates(const RMat& h, const HilbertSpace& space);

}  // namespace tcsim
