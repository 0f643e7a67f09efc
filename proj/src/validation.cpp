#include "axml/validation.hpp"
