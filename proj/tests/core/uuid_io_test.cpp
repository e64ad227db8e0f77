#include "generators.hpp"

#include "sharelm/io.hpp"
#include "sharelm/uuid.hpp"

#include <gtest/gtest.h>

#include <set>

using namespace sharelm;

TEST(Uuid, CanonicalVersion4) {
    std::mt19937_64 engine(1);
    std::set<std::string> seen;
    for (int i = 0; i < 1000; ++i) {
        auto id = make_uuid(engine);
        ASSERT_TRUE(is_uuid(id)) << id;
        ASSERT_EQ(id[14], '4');
        ASSERT_NE(std::string("89ab").find(id[19]), std::string::npos);
        seen.insert(id);
    }
    EXPECT_EQ(seen.size(), 1000u);
}

TEST(Uuid, SeededIsDeterministic) {
    std::mt19937_64 a(42), b(42);
    EXPECT_EQ(make_uuid(a), make_uuid(b));
}

TEST(Uuid, PatternIsExact) {
    EXPECT_TRUE(is_uuid("123e4567-e89b-42d3-a456-426614174000"));
    EXPECT_FALSE(is_uuid("123E4567-E89B-42D3-A456-426614174000"));
    EXPECT_FALSE(is_uuid("123e4567e89b42d3a456426614174000"));
    EXPECT_FALSE(is_uuid("123e4567-e89b-42d3-a456-42661417400"));
    EXPECT_FALSE(is_uuid("123e4567-e89b-42d3-a456-4266141740000"));
    EXPECT_FALSE(is_uuid("g23e4567-e89b-42d3-a456-426614174000"));
}

TEST(Io, AtomicWriteAndRead) {
    auto dir = sharelm::testing::make_temp_dir("sharelm-io");
    auto path = dir / "out.jsonl";
    write_file_atomically(path, "a\n\nb\r\n");
    EXPECT_EQ(read_file(path), "a\n\nb\r\n");
    EXPECT_EQ(read_lines(path), (std::vector<std::string>{"a", "b"}));
    write_file_atomically(path, "c\n");
    EXPECT_EQ(read_file(path), "c\n");
    std::size_t entries = 0;
    for ([[maybe_unused]] const auto& e : std::filesystem::directory_iterator(dir)) ++entries;
    EXPECT_EQ(entries, 1u);
    std::filesystem::remove_all(dir);
}

TEST(Io, UnwritableDirectoryThrows) {
    EXPECT_THROW(write_file_atomically("/nonexistent-dir/x/out.txt", "x"), IoError);
    EXPECT_THROW(read_file("/nonexistent-dir/x/out.txt"), IoError);
}
