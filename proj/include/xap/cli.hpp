#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"

#include "xap/bounds.hpp"

namespace xap::cli {

using Json = nlohmann::ordered_json;

/*
 * Runs one command line (program name excluded).  Reports go to `out`,
 * diagnostics to `err`.  Exit codes: 0 success, 1 parse or usage error,
 * 2 precondition failure (the report is still written).
 */
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/* LangConfig from {"c_L": .., "kl_slack": .., "overrides": {..},
 * "bounded_denominator": {"c": .., "base": ..}}; every key optional. */
LangConfig lang_config_from_json(const Json& j);

Json ledger_to_json(const BoundLedger& ledger);
BoundLedger ledger_from_json(const Json& j);

} // namespace xap::cli
