#pragma once

#define DIRLAB_VERSION_STRING "0.3.0"
