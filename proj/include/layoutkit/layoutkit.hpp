// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "layoutkit/bench.hpp"
#include "layoutkit/curation.hpp"
#include "layoutkit/dataset.hpp"
#include "layoutkit/errors.hpp"
#include "layoutkit/eval_coco.hpp"
#include "layoutkit/eval_docling.hpp"
#include "layoutkit/geometry.hpp"
#include "layoutkit/ingest.hpp"
#include "layoutkit/postprocess.hpp"
#include "layoutkit/report.hpp"
#include "layoutkit/taxonomy.hpp"
#include "layoutkit/viz.hpp"
