#pragma once

// Umbrella header.

#include "ozcheck/blocks.hpp"
#include "ozcheck/connector.hpp"
#include "ozcheck/errors.hpp"
#include "ozcheck/io.hpp"
#include "ozcheck/linalg.hpp"
#include "ozcheck/matfield.hpp"
#include "ozcheck/ordzero.hpp"
#include "ozcheck/pl_identities.hpp"
#include "ozcheck/plfun.hpp"
#include "ozcheck/rational.hpp"
#include "ozcheck/report.hpp"
#include "ozcheck/suite.hpp"
#include "ozcheck/tower.hpp"
#include "ozcheck/traces.hpp"
