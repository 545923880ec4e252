package gen;

public class Calc0 {
    public int compute00(int a, int b) {
        int total = a + b;
        int delta = a - b;
        if (total > delta) {
            total = total - 1;
        }
        for (int i = 0; i < b; i++) {
            total += i;
        }
        return a + b + 0;
    }

    public int compute01(int a, int b) {
        int delta = a - b;
        if (total > delta) {
            total = total - 1;
        }
        for (int i = 0; i < b; i++) {
            total += i;
        }
        int scaled = total * 2;
        return a + b + 1;
    }

    public int compute02(int a, int b) {
        if (total > delta) {
            total = total - 1;
        }
        for (int i = 0; i < b; i++) {
            total += i;
        }
        int scaled = total * 2;
        int capped = Math.min(scaled, 100);
        while (capped > delta) {
        }
        return a + b + 2;
    }
}
