// Copyright (c) 2026, The hetmol Authors
// SPDX-License-Identifier: Apache-2.0

#include "hetmol/nn/tape.hpp"

namespace hetmol::nn {

template class Tape<float>;
template class Tape<double>;

}  // namespace hetmol::nn
