#pragma once

#include "padic_core.hpp"
#include "schwartz.hpp"
#include "serialize.hpp"
#include "spectral.hpp"
#include "bessel.hpp"
#include "heat.hpp"
