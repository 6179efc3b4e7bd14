/*
 * Copyright 2026 The semgraph Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#pragma once

#include "semgraph/common.hpp"
#include "semgraph/engine.hpp"
#include "semgraph/graph_store.hpp"
#include "semgraph/io_engine.hpp"
#include "semgraph/io_stats.hpp"

#include "semgraph/algorithms/betweenness.hpp"
#include "semgraph/algorithms/bfs.hpp"
#include "semgraph/algorithms/coreness.hpp"
#include "semgraph/algorithms/louvain.hpp"
#include "semgraph/algorithms/pagerank.hpp"
#include "semgraph/algorithms/triangles.hpp"
