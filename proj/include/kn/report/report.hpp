#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "kn/analysis/growth.hpp"
#include "kn/metivier/metivier.hpp"
#include "kn/pdo/operator.hpp"
#include "kn/weights/properties.hpp"

namespace kn::report {

using nlohmann::json;

inline constexpr int kSchemaVersion = 1;

// CSV table; cells are written verbatim, so callers format numbers.
struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::string to_csv() const;
};

std::string number(double v);
std::string utc_timestamp();

// {schema_version, generated_at, command, inputs, result}
json envelope(const std::string& command, json inputs, json result, const std::string& generated_at = utc_timestamp());
// Drops generated_at, for comparisons.
json without_timestamp(json j);

json to_json(const weights::AxiomReport& r);
json to_json(const weights::PropertyReport& r, std::size_t max_violations = 50);
json to_json(const weights::ShiftBound& b);
json to_json(const pdo::LinearPDO& p);
json to_json(const pdo::EllipticityVerdict& v);
json to_json(const analysis::NormTable& t);
json to_json(const analysis::RoumieuFit& f);
json to_json(const analysis::GrowthReport& r);
json to_json(const std::vector<analysis::RecursionRow>& rows);
json to_json(const metivier::CounterexampleReport& r);

// Every input report keeps its own envelope under "reports".
json merge(const std::vector<json>& reports);

// Writes <prefix>.json and, when the table has rows, <prefix>.csv.
void write(const std::string& prefix, const json& j, const Table& table);

}  // namespace kn::report
