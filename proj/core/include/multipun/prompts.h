#pragma once

// Prompt templates and the placeholder renderer.
//
// A placeholder is `{name}` where name is [A-Za-z_][A-Za-z0-9_]*. Any other
// brace (the JSON examples inside the evaluation prompts) is literal text.

#include <map>
#include <set>
#include <string>
#include <string_view>

namespace multipun::prompts {

using Fields = std::map<std::string, std::string, std::less<>>;

// Substitutes every placeholder. Throws TemplateError naming the first
// placeholder without a binding. Unused bindings are ignored.
std::string render_prompt(std::string_view tmpl, const Fields& fields);

// Distinct placeholder names, sorted.
std::set<std::string> placeholders(std::string_view tmpl);

// Sample construction. Fields: wp, wa, sp_def, sa_def.
extern const std::string_view kCreativeHomophonic;
// Fields: word, sp_def, sa_def.
extern const std::string_view kCreativeHomographic;
// Fields: caption, word, meaning.
extern const std::string_view kExplicativeSubstitution;
// Fields: visual, caption, word, entity.
extern const std::string_view kRandomSubstitution;

enum class Task { kDetection, kLocalization, kExplanation };
enum class Bias { kToPun, kToNonPun };
enum class Strategy { kVanilla, kPunCot };

std::string_view to_string(Task t);
std::string_view to_string(Bias b);
std::string_view to_string(Strategy s);
Task parse_task(std::string_view s);          // ArgumentError
Bias parse_bias(std::string_view s);          // ArgumentError
Strategy parse_strategy(std::string_view s);  // ArgumentError

// Evaluation prompt for one (task, bias, strategy) with the single field
// `caption`. Throws ArgumentError for pun-cot outside the explanation task.
std::string evaluation_template(Task task, Bias bias, Strategy strategy);

// The sentence appended to every to-non-pun prompt.
extern const std::string_view kNonPunNote;

}  // namespace multipun::prompts
