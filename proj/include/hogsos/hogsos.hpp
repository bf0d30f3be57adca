#pragma once

#include "hogsos/error.hpp"
#include "hogsos/term.hpp"
#include "hogsos/spec.hpp"
#include "hogsos/behavior.hpp"
#include "hogsos/engine.hpp"
#include "hogsos/bisim.hpp"
#include "hogsos/builtin.hpp"
#include "hogsos/lambda.hpp"
#include "hogsos/lambda_bisim.hpp"
#include "hogsos/json_io.hpp"
