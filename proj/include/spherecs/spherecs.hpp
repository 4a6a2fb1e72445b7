#pragma once

#include "spherecs/design.hpp"
#include "spherecs/dynamics.hpp"
#include "spherecs/errors.hpp"
#include "spherecs/fockspace.hpp"
#include "spherecs/io.hpp"
#include "spherecs/nonclassicality.hpp"
#include "spherecs/ode.hpp"
#include "spherecs/scs.hpp"
#include "spherecs/specfun.hpp"

namespace spherecs {
inline constexpr const char* kVersion = "0.1.0";
}
