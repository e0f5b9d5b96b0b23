#pragma once

// Umbrella header for the discrete graph-world navigation harness.
// The live chat adapter lives in flexnav/live.hpp and is not pulled in here
// to keep httplib out of builds that never talk to an endpoint.

#include "flexnav/common.hpp"
#include "flexnav/envgen.hpp"
#include "flexnav/envgraph.hpp"
#include "flexnav/execute.hpp"
#include "flexnav/locate.hpp"
#include "flexnav/metrics.hpp"
#include "flexnav/mocks.hpp"
#include "flexnav/perceive.hpp"
#include "flexnav/plan.hpp"
#include "flexnav/providers.hpp"
#include "flexnav/runner.hpp"
#include "flexnav/telemetry.hpp"
#include "flexnav/textualize.hpp"
#include "flexnav/trajectory.hpp"
#include "flexnav/verify.hpp"
