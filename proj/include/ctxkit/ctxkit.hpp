#ifndef CTXKIT_CTXKIT_HPP
#define CTXKIT_CTXKIT_HPP

#include "ctxkit/contextuality.hpp"
#include "ctxkit/error.hpp"
#include "ctxkit/examples.hpp"
#include "ctxkit/inchworm.hpp"
#include "ctxkit/logic.hpp"
#include "ctxkit/model.hpp"
#include "ctxkit/parser.hpp"
#include "ctxkit/scenario.hpp"
#include "ctxkit/scenario_file.hpp"
#include "ctxkit/section.hpp"
#include "ctxkit/semantics.hpp"
#include "ctxkit/xor_avn.hpp"

#endif  // CTXKIT_CTXKIT_HPP
