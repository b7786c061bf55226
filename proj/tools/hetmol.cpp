// Copyright (c) 2026, The hetmol Authors
// SPDX-License-Identifier: Apache-2.0

#include <iostream>

#include "hetmol/cli/commands.hpp"

int main(int argc, char** argv) { return hetmol::cli::run(argc, argv, std::cout, std::cerr); }
