#pragma once
// Umbrella header.

#include "tilepeps/config.hpp"
#include "tilepeps/errors.hpp"
#include "tilepeps/hamiltonian.hpp"
#include "tilepeps/parent.hpp"
#include "tilepeps/pipeline.hpp"
#include "tilepeps/tensor.hpp"
#include "tilepeps/tiling.hpp"
#include "tilepeps/tmcompile.hpp"
#include "tilepeps/turing.hpp"
