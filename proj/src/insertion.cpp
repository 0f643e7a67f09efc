#include "axml/insertion.hpp"
