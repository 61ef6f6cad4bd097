#pragma once

// Everything except the HTTP client (labor/llm/live_backend.hpp).

#include "labor/agent.hpp"
#include "labor/coordination.hpp"
#include "labor/evaluator.hpp"
#include "labor/llm/backend.hpp"
#include "labor/llm/config.hpp"
#include "labor/llm/prompt.hpp"
#include "labor/llm/tool_call.hpp"
#include "labor/oracle.hpp"
#include "labor/skills.hpp"
#include "labor/snapshot.hpp"
#include "labor/tasks.hpp"
#include "labor/world.hpp"
