// SPDX-License-Identifier: Apache-2.0
//
// copxsim - coexistence simulator for deployable and public radio networks
// Copyright (C) 2026 The copxsim authors

#include "copx/cli.hpp"

#include <iostream>

int main(int argc, char** argv)
{
    return copx::cli::main(argc, argv, std::cout, std::cerr);
}
