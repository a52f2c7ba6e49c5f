#pragma once

#include "cavity_tangle/model.hpp"
#include "cavity_tangle/dynamics.hpp"
#include "cavity_tangle/entanglement.hpp"
#include "cavity_tangle/scan.hpp"
