#pragma once

// Correlated-alarm detection: alarm-log preprocessing, co-occurrence graph
// construction, biased random-walk embedding, consensus clustering and PCA
// projection, plus the file pipeline tying them together.

#include "alarmgraph/ahc.hpp"
#include "alarmgraph/config.hpp"
#include "alarmgraph/consensus.hpp"
#include "alarmgraph/graph.hpp"
#include "alarmgraph/ingest.hpp"
#include "alarmgraph/io.hpp"
#include "alarmgraph/kmeans.hpp"
#include "alarmgraph/pca.hpp"
#include "alarmgraph/pipeline.hpp"
#include "alarmgraph/preprocess.hpp"
#include "alarmgraph/report.hpp"
#include "alarmgraph/skipgram.hpp"
#include "alarmgraph/synth.hpp"
#include "alarmgraph/walks.hpp"
