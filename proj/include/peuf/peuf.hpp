#pragma once

#include "peuf/expr.hpp"
#include "peuf/parse.hpp"
#include "peuf/eval.hpp"
#include "peuf/polarity.hpp"
#include "peuf/elim.hpp"
#include "peuf/prop.hpp"
#include "peuf/cnf.hpp"
#include "peuf/dpll.hpp"
#include "peuf/bitvec.hpp"
#include "peuf/pairwise.hpp"
#include "peuf/oracle.hpp"
#include "peuf/decide.hpp"
#include "peuf/pipeline.hpp"
#include "peuf/random.hpp"
