#pragma once

// Convenience header pulling in the whole library.

#include "reprosurv/error.hpp"
#include "reprosurv/rng.hpp"
#include "reprosurv/csv.hpp"
#include "reprosurv/stats.hpp"
#include "reprosurv/ingest.hpp"
#include "reprosurv/survival.hpp"
#include "reprosurv/cox.hpp"
#include "reprosurv/logistic.hpp"
#include "reprosurv/boosted.hpp"
#include "reprosurv/validation.hpp"
#include "reprosurv/shap.hpp"
#include "reprosurv/svg.hpp"
#include "reprosurv/synthetic.hpp"
#include "reprosurv/report.hpp"
