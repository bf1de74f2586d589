// Everything except the CLI front end.
#pragma once

#include "fockcoh/coherence.hpp"
#include "fockcoh/common.hpp"
#include "fockcoh/distill.hpp"
#include "fockcoh/fock.hpp"
#include "fockcoh/freesets.hpp"
#include "fockcoh/io.hpp"
#include "fockcoh/logweight.hpp"
#include "fockcoh/optimize.hpp"
#include "fockcoh/probability.hpp"
#include "fockcoh/protocol.hpp"
#include "fockcoh/states.hpp"
