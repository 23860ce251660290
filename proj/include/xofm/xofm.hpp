#pragma once

#include "xofm/dataset.hpp"
#include "xofm/encoding.hpp"
#include "xofm/error.hpp"
#include "xofm/evaluation.hpp"
#include "xofm/explain.hpp"
#include "xofm/inference.hpp"
#include "xofm/model.hpp"
#include "xofm/training.hpp"
