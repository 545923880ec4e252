package app;

public class ConfigTest {
    public void testGetStringMissingKey() {
        Config config = new Config(new java.util.Properties());
        String onlyInTests = config.getString("absent");
        assert onlyInTests.isEmpty();
    }
}
