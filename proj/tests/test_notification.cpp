#include <catch2/catch_amalgamated.hpp>

#include <random>
#include <string>
#include <vector>

#include "command_gen.hpp"
#include "engine/notification.hpp"

using namespace engine;
using testgen::canonical_bindings;
using testgen::random_bindings;

namespace {
const char* kCanonicalBlock = testgen::canonical_block();
}

TEST_CASE("render_xml reproduces the canonical block byte for byte", "[notify][render]") {
  REQUIRE(render_xml(canonical_bindings()) == kCanonicalBlock);
  REQUIRE(render_xml(canonical_bindings()) == render_xml(canonical_bindings()));
}

TEST_CASE("render_xml handles empty lists and device attributes", "[notify][render]") {
  REQUIRE(render_xml({}) == "<output></output>\n");

  std::vector<device_binding> b{
      {event_banner{"highrisk", "1001"}, "vxportal6", {}},
  };
  REQUIRE(render_xml(b) ==
          "<output>\n"
          "<command device=\"vxportal6\" type=\"event\" category=\"highrisk\" "
          "id=\"1001\"></command>\n"
          "</output>\n");
}

TEST_CASE("render_xml escapes attribute values", "[notify][render]") {
  std::vector<device_binding> b{{event_banner{"a&b<c>\"d", "x"}, std::nullopt, {}}};
  std::string xml = render_xml(b);
  REQUIRE(xml.find("category=\"a&amp;b&lt;c&gt;&quot;d\"") != std::string::npos);
}

TEST_CASE("parse_xml reads the canonical block back", "[notify][parse]") {
  std::vector<device_binding> parsed = parse_xml(kCanonicalBlock);
  REQUIRE(parsed == canonical_bindings());
  REQUIRE(parsed.size() == 4);
  REQUIRE(std::holds_alternative<display_profile>(parsed[0].command));
  const auto& img = std::get<composite_image>(parsed[1].command);
  REQUIRE(img.overlays.size() == 2);
  REQUIRE(std::get<rect_overlay>(img.overlays[0]) == rect_overlay{350, 600, 120, 150});
  REQUIRE(std::get<text_overlay>(img.overlays[1]).text == "Incident at Grid Substation");
  REQUIRE(std::get<earth_view>(parsed[2].command).lat == "-38.1771269");
  REQUIRE(std::get<map_view>(parsed[3].command).zoom == "15z");
}

TEST_CASE("parse_xml is indifferent to indentation and trailing blanks", "[notify][parse]") {
  // the same four commands, laid out with the mixed tabs/spaces of a
  // hand-written file
  const char* block =
      "<output>\n"
      "           <command type=\"display\" profile=\"ptz_camera3_view\"></command>\n"
      "\t\t   <command type=\"composite_image\" image=\"gridsubstation.jpg\">\n"
      "              <display type=\"rect\" x=\"350\" y=\"600\" w=\"120\" h=\"150\"></display>\n"
      "              <display type=\"text\" text=\"Incident at Grid Substation\" x=\"130\" "
      "y=\"90\" color=\"red\"></display>\n"
      "           </command>\n"
      "           <command type=\"earth\" lat=\"-38.1771269\" long=\"146.3428259\" "
      "height=\"100m\"></command>\n"
      "\t\t   <command type=\"map\" lat=\"-38.1771269\" long=\"146.3428259\" "
      "zoom=\"15z\"></command>                   \n"
      "</output>\n";
  REQUIRE(parse_xml(block) == canonical_bindings());
}

TEST_CASE("parse_xml accepts the legacy device-specific dialect", "[notify][parse][legacy]") {
  SECTION("misspelled catagory attribute") {
    auto parsed = parse_xml(
        "<output><command device=\"vxportal6\" type=\"event\" catagory=\"highrisk\" "
        "id=\"1001\"></command></output>");
    REQUIRE(parsed.size() == 1);
    REQUIRE(std::get<event_banner>(parsed[0].command) == event_banner{"highrisk", "1001"});
    REQUIRE(parsed[0].device == "vxportal6");
    // ...and the corrected spelling is what render emits.
    std::string rerendered = render_xml(parsed);
    REQUIRE(rerendered.find("category=\"highrisk\"") != std::string::npos);
    REQUIRE(rerendered.find("catagory") == std::string::npos);
  }
  SECTION("flat view command becomes a composite image") {
    auto parsed = parse_xml(
        "<output><command device=\"vxlab\" type=\"view\" image=\"gridsubstation.jpg\" "
        "rectx=\"350\" recty=\"600\" rectw=\"120\" recth=\"150\" text=\"Grid Substation\" "
        "txtx=\"130\" txty=\"90\"></command></output>");
    REQUIRE(parsed.size() == 1);
    const auto& img = std::get<composite_image>(parsed[0].command);
    REQUIRE(img.image == "gridsubstation.jpg");
    REQUIRE(img.overlays.size() == 2);
    REQUIRE(std::get<rect_overlay>(img.overlays[0]) == rect_overlay{350, 600, 120, 150});
    const auto& text = std::get<text_overlay>(img.overlays[1]);
    REQUIRE(text.text == "Grid Substation");
    REQUIRE(text.x == 130);
    REQUIRE(text.y == 90);
  }
  SECTION("display with an image attribute is the same legacy form") {
    auto parsed = parse_xml(
        "<output><command type=\"display\" image=\"cam.jpg\"></command></output>");
    REQUIRE(std::get<composite_image>(parsed[0].command).image == "cam.jpg");
  }
}

TEST_CASE("parse_xml surfaces structured errors", "[notify][parse][errors]") {
  REQUIRE_THROWS_AS(parse_xml("<wrong></wrong>"), xml_error);
  REQUIRE_THROWS_AS(parse_xml("<output><command type=\"display\""), xml_error);
  REQUIRE_THROWS_AS(parse_xml("<output>text</output>"), xml_error);
  REQUIRE_THROWS_AS(
      parse_xml("<output><command type=\"map\" lat=\"1\" long=\"2\"></command></output>"),
      xml_error);  // missing zoom
  REQUIRE_THROWS_AS(
      parse_xml(
          "<output><command type=\"map\" lat=\"95\" long=\"0\" zoom=\"1z\"></command></output>"),
      xml_error);  // latitude out of range
  REQUIRE_THROWS_AS(parse_xml("<output><command type=\"event\" category=\"a&bad;\" "
                              "id=\"1\"></command></output>"),
                    xml_error);

  try {
    parse_xml("<output><command type=\"hologram\"></command></output>");
    FAIL("expected unknown_command_type");
  } catch (const unknown_command_type& e) {
    REQUIRE(e.type() == "hologram");
  }
}

TEST_CASE("parse_xml keeps unknown attributes as extras", "[notify][parse]") {
  auto parsed = parse_xml(
      "<output><command type=\"display\" profile=\"bob\" priority=\"7\" "
      "venue=\"hall\"></command></output>");
  REQUIRE(parsed.size() == 1);
  REQUIRE(parsed[0].extras == std::vector<std::pair<std::string, std::string>>{
                                  {"priority", "7"}, {"venue", "hall"}});
}

TEST_CASE("parse_xml tolerates comments, declarations, and self-closing tags",
          "[notify][parse]") {
  auto parsed = parse_xml(
      "<?xml version=\"1.0\"?>\n<!-- banner batch -->\n"
      "<output><command type=\"event\" category=\"c\" id=\"1\"/></output>");
  REQUIRE(parsed.size() == 1);
}

TEST_CASE("render then parse is the identity on random binding lists",
          "[notify][property]") {
  std::mt19937 rng(112358);
  for (int i = 0; i < 500; ++i) {
    std::vector<device_binding> b = random_bindings(rng);
    std::vector<device_binding> back = parse_xml(render_xml(b));
    REQUIRE(back == b);
  }
}

TEST_CASE("bind_devices honors capabilities with a default fallback", "[notify][bind]") {
  device_registry registry(
      {
          {"wall", {device_capability::banner, device_capability::display,
                    device_capability::image, device_capability::map, device_capability::earth}},
          {"tablet-bob", {device_capability::banner, device_capability::display}},
      },
      "wall");

  std::vector<visualization_command> commands{
      event_banner{"alarm", "1"},
      display_profile{"bob"},
      map_view{"-38.1", "146.3", "15z"},
  };

  SECTION("unsupported kinds fall back to the default device") {
    auto bindings = bind_devices(commands, std::vector<std::string>{"tablet-bob"}, registry);
    REQUIRE(bindings.size() == 3);
    REQUIRE(bindings[0].device == "tablet-bob");
    REQUIRE(bindings[1].device == "tablet-bob");
    REQUIRE(bindings[2].device == "wall");  // map not supported on the tablet
  }
  SECTION("two targets times three commands in target-major order") {
    auto bindings =
        bind_devices(commands, std::vector<std::string>{"wall", "tablet-bob"}, registry);
    REQUIRE(bindings.size() == 6);
    for (int i = 0; i < 3; ++i) REQUIRE(bindings[i].device == "wall");
    REQUIRE(bindings[3].device == "tablet-bob");
    REQUIRE(bindings[5].device == "wall");
    for (std::size_t i = 0; i < bindings.size(); ++i) {
      REQUIRE(bindings[i].command == commands[i % 3]);
      REQUIRE(registry.known(*bindings[i].device));
    }
  }
  SECTION("no targets means device-independent passthrough") {
    auto bindings = bind_devices(commands, std::vector<std::string>{}, registry);
    REQUIRE(bindings.size() == 3);
    for (const auto& b : bindings) REQUIRE_FALSE(b.device.has_value());
  }
  SECTION("an unregistered target device falls back entirely") {
    auto bindings = bind_devices(commands, std::vector<std::string>{"ghost"}, registry);
    for (const auto& b : bindings) REQUIRE(b.device == "wall");
  }
  SECTION("the default device must be registered") {
    REQUIRE_THROWS_AS(device_registry({{"a", {}}}, "missing"), config_error);
  }
}
