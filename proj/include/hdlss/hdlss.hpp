#pragma once

#include "hdlss/certificate.hpp"
#include "hdlss/classify.hpp"
#include "hdlss/core.hpp"
#include "hdlss/dataset.hpp"
#include "hdlss/diagnostics.hpp"
#include "hdlss/dwd.hpp"
#include "hdlss/io.hpp"
#include "hdlss/numerics.hpp"
#include "hdlss/registration.hpp"
#include "hdlss/socp.hpp"
#include "hdlss/svm.hpp"
#include "hdlss/types.hpp"
