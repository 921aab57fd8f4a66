#pragma once

#include "admg/construction.hpp"
#include "admg/fixing.hpp"
#include "admg/generators.hpp"
#include "admg/graph.hpp"
#include "admg/io.hpp"
#include "admg/kernel.hpp"
#include "admg/minimality.hpp"
#include "admg/oracle.hpp"
#include "admg/projection.hpp"
