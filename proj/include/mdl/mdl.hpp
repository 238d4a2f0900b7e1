#pragma once

// Static deadlock analysis for synchronous message-passing programs.

#include "mdl/ast.hpp"
#include "mdl/c0.hpp"
#include "mdl/classify.hpp"
#include "mdl/l0.hpp"
#include "mdl/match.hpp"
#include "mdl/message.hpp"
#include "mdl/model.hpp"
#include "mdl/oracle.hpp"
#include "mdl/parser.hpp"
#include "mdl/rational.hpp"
#include "mdl/report.hpp"
#include "mdl/s0.hpp"
