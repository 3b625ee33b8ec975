#pragma once

// Umbrella include. The HTTP transport is deliberately not here: pulling it
// in compiles the bundled HTTP client, which only live-capable binaries need.

#include "emdm/categorize.hpp"
#include "emdm/dataset.hpp"
#include "emdm/errors.hpp"
#include "emdm/gateway.hpp"
#include "emdm/grading.hpp"
#include "emdm/hash.hpp"
#include "emdm/manifest.hpp"
#include "emdm/metrics.hpp"
#include "emdm/pipeline.hpp"
#include "emdm/prompts.hpp"
#include "emdm/report.hpp"
#include "emdm/textutil.hpp"
#include "emdm/weights.hpp"
