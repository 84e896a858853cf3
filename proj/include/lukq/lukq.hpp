// Umbrella header for the query library (everything except the HTTP glue).
#pragma once

#include "lukq/dataset.hpp"
#include "lukq/formula.hpp"
#include "lukq/hedges.hpp"
#include "lukq/parser.hpp"
#include "lukq/query.hpp"
#include "lukq/rational.hpp"
#include "lukq/service.hpp"
#include "lukq/sql.hpp"
