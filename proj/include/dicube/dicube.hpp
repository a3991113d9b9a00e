#pragma once
// Everything.

#include <dicube/site.hpp>
#include <dicube/presheaf.hpp>
#include <dicube/construct.hpp>
#include <dicube/subdivision.hpp>
#include <dicube/triangulation.hpp>
#include <dicube/extension.hpp>
#include <dicube/homotopy.hpp>
#include <dicube/generate.hpp>
#include <dicube/approximation.hpp>
#include <dicube/io.hpp>
#include <dicube/verify.hpp>
