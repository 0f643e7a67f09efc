#include "axml/io.hpp"
