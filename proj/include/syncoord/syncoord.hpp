#pragma once

#include "syncoord/bounds.hpp"
#include "syncoord/featurize.hpp"
#include "syncoord/graph_json.hpp"
#include "syncoord/linegraph.hpp"
#include "syncoord/molgraph.hpp"
#include "syncoord/pipeline.hpp"
#include "syncoord/pprdist.hpp"
#include "syncoord/refnet.hpp"
#include "syncoord/smiles.hpp"
#include "syncoord/uff_params.hpp"
#include "syncoord/validate.hpp"
