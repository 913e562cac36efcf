// Copyright 2026 The sstab Authors
// SPDX-License-Identifier: Apache-2.0

#include <iostream>

#include "sstab/cli.hpp"

int main(int argc, char** argv) { return sstab::run_cli(argc, argv, std::cout, std::cerr); }
