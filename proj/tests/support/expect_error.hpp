#pragma once

#include <gtest/gtest.h>

#include "oee/error.hpp"

#define EXPECT_OEE_ERROR(stmt, expected)                                              \
  do {                                                                                \
    try {                                                                             \
      stmt;                                                                           \
      ADD_FAILURE() << "expected " #expected " from: " #stmt;                        \
    } catch (const ::oee::Error& err_) {                                              \
      EXPECT_EQ(err_.code(), ::oee::ErrorCode::expected) << err_.what();             \
    }                                                                                 \
  } while (0)
