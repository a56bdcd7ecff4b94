#include <gtest/gtest.h>

#include "msc/text.hpp"

using namespace msc::text;

TEST(Utf8, DecodesMultibyteAndRejectsBrokenSequences) {
  EXPECT_TRUE(is_valid_utf8("Solitário"));
  EXPECT_TRUE(is_valid_utf8("Ελλάδα"));
  EXPECT_FALSE(is_valid_utf8("bad\xC3"));
  EXPECT_FALSE(is_valid_utf8("\xC0\xAF"));  // overlong '/'
  EXPECT_EQ(find_invalid_utf8("ab\xFF"), 2u);
}

TEST(Utf8, EncodeDecodeRoundTrip) {
  for (char32_t cp : {U'a', U'é', U'Ω', U'ж', U'€', U'😀'}) {
    std::string s;
    encode_one(cp, s);
    std::size_t pos = 0;
    EXPECT_EQ(decode_one(s, pos), cp);
    EXPECT_EQ(pos, s.size());
  }
}

TEST(FoldCase, LowercasesLatinGreekCyrillicWithoutStrippingAccents) {
  EXPECT_EQ(fold_case("George SOLITÁRIO"), "george solitário");
  EXPECT_EQ(fold_case("ÀÉÎÕÜ Ç"), "àéîõü ç");
  EXPECT_EQ(fold_case("ΑΒΓ"), "αβγ");
  EXPECT_EQ(fold_case("ЖУК"), "жук");
  EXPECT_EQ(fold_case("İ"), "i");
  EXPECT_EQ(fold_case("123 ,."), "123 ,.");
}

TEST(WordChars, PunctuationHasNone) {
  EXPECT_FALSE(has_word_char(","));
  EXPECT_FALSE(has_word_char("..."));
  EXPECT_TRUE(has_word_char("é"));
  EXPECT_TRUE(has_word_char("a-b"));
  EXPECT_TRUE(has_word_char("42"));
}

TEST(Split, KeepsEmptyFields) {
  const auto parts = split("a,,b", ',');
  ASSERT_EQ(parts.size(), 3u);
  EXPECT_EQ(parts[1], "");
  EXPECT_EQ(trim("  x \t"), "x");
}
