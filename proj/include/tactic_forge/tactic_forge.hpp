#pragma once

#include "tactic_forge/term.hpp"
#include "tactic_forge/features.hpp"
#include "tactic_forge/tactic_db.hpp"
#include "tactic_forge/similarity.hpp"
#include "tactic_forge/predictors.hpp"
#include "tactic_forge/lsh_forest.hpp"
#include "tactic_forge/script.hpp"
#include "tactic_forge/proof_env.hpp"
#include "tactic_forge/rule_kernel.hpp"
#include "tactic_forge/replay_kernel.hpp"
#include "tactic_forge/recorder.hpp"
#include "tactic_forge/search.hpp"
#include "tactic_forge/corpus.hpp"
#include "tactic_forge/eval.hpp"
