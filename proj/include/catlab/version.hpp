#pragma once

#define CATLAB_VERSION "0.1.0"
