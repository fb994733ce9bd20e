// Copyright 2026 The lefcert Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// JSON results records. Keys keep insertion order, so a given input always
// serializes to the same bytes. Infinite bounds are written as the string
// "inf" because JSON has no infinity literal.

#ifndef LEFCERT_RESULTS_H_
#define LEFCERT_RESULTS_H_

#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "lefcert/certify.h"
#include "lefcert/collective.h"
#include "lefcert/harness.h"
#include "lefcert/oracle.h"
#include "lefcert/types.h"

namespace lefcert::results {

using Json = nlohmann::ordered_json;

Json number(double v);
Json config_json(const CertConfig& cfg);
Json bound_table_json(const bounds::BoundTable& t);

// {predicted, certified} plus failing_split {t_pred, class} when the
// certificate failed.
Json certificate_json(const certify::Certificate& c);

// certified_accuracy is an object keyed "0", "1", ... in budget order.
// runtime_seconds is left out when `timing` is false.
Json run_metrics_json(const harness::RunMetrics& m, bool timing);

Json collective_json(const collective::CollectiveResult& r);
Json oracle_report_json(const oracle::Report& r);

Json sweep_json(std::span<const harness::SweepRow> rows, bool timing);
// Columns: protocol,T,M,lambda,metric,clean_acc,cert_acc,runtime_s,seed
std::string sweep_csv(std::span<const harness::SweepRow> rows, bool timing);

// Two-space indentation and a trailing newline.
std::string dump(const Json& j);

// Throws IO_FAILURE.
void write_results(const Json& j, const std::string& path);

}  // namespace lefcert::results

#endif  // LEFCERT_RESULTS_H_
